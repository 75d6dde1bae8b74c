"""TMA Capacity: arrival capacity of terminal airspace from its structural space"""

__version__ = "1.0.0"
