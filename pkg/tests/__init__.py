"""
Test suite for Special Circles
"""
