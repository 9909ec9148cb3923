"""Task-class backends: cryptopuzzle, k-OV and threshold TSP."""
