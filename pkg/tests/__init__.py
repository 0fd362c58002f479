"""
spectralfield test suite
"""
