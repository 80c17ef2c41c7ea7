"""Quantum Circuit Execution System - Tests Package"""
