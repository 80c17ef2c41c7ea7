"""LGKS Steady-State Uniqueness Audit - Application Package"""
