"""CLI module for the relation engine"""
