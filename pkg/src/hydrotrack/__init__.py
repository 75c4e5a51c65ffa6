"""Water-intake sensing and intervention engine.

Subsystems: sensing (bottle state machine), hydration (level/band/tier
model), scheduler (prompting and ambient feedback), eventlog (durable
append-only log), analysis (effectiveness and phase statistics), simulator
(seeded traces and synthetic study logs), gateway (CLI + HTTP API).
"""

__version__ = "0.1.0"
