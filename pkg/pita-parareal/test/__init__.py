"""
Package for the tests.
"""
