"""Test suite for the content creation agent."""
