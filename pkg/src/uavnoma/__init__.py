"""UAV-relayed double-uplink NOMA: outage analytics, simulation, optimization."""

__version__ = "0.1.0"
