"""Two dipole-coupled four-level atoms: decoherence-free subspace and qubit control."""
__version__ = "0.1.0"
