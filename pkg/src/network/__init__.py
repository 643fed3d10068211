"""Dense networks with standard and Hadamard hidden layers."""
