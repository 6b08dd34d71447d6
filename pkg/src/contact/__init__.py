"""Soft ground contact and floating-base system dynamics"""
from src.contact.model import (
    SystemDynamicsConfig,
    contact_external_forces,
    contact_force_body_frame,
    contact_force_contact_frame,
    standing_height,
    standing_state,
    static_torques,
    system_dynamics,
)
from src.contact.params import ContactModelParams, load_contact_params

__all__ = [
    "ContactModelParams",
    "load_contact_params",
    "SystemDynamicsConfig",
    "contact_external_forces",
    "contact_force_body_frame",
    "contact_force_contact_frame",
    "standing_height",
    "standing_state",
    "static_torques",
    "system_dynamics",
]
