"""Neural network layers of the model."""
