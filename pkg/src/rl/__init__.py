"""Desk-scale DQN on an in-repo chain MDP."""
