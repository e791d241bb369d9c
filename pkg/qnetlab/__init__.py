"""
qnetlab
Simulator and policy library for networks of constrained queues
"""
from dotenv import load_dotenv

load_dotenv()

__version__ = "1.0.0"
