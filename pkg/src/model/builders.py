"""
Programmatic model construction
"""
from src.model.robot_model import EndEffector, Joint, JointType, Link, RobotModel
from src.spatial.algebra import SpatialInertia


def chain_model(n_links: int, link_length: float = 0.3, mass: float = 1.0) -> RobotModel:
    """
    Serial chain of revolute joints alternating between z and y axes

    Args:
        n_links: Number of links (>= 1)
        link_length: Distance between consecutive joints (m)
        mass: Mass of each link (kg)

    Returns:
        Fixed-base model with one end-effector ``tip`` at the last link's end
    """
    if n_links < 1:
        raise ValueError("A chain needs at least one link")

    half = 0.5 * link_length
    # Slender rod about its centre of mass
    transverse = mass * link_length * link_length / 12.0
    axial = 0.01 * transverse
    rod = ((axial, 0.0, 0.0), (0.0, transverse, 0.0), (0.0, 0.0, transverse))

    links = []
    for i in range(n_links):
        axis = (0.0, 0.0, 1.0) if i % 2 == 0 else (0.0, 1.0, 0.0)
        xyz = (0.0, 0.0, 0.0) if i == 0 else (link_length, 0.0, 0.0)
        links.append(
            Link(
                name=f"link{i + 1}",
                parent_index=None if i == 0 else i - 1,
                joint=Joint(kind=JointType.REVOLUTE, axis=axis, xyz=xyz),
                inertia=SpatialInertia(mass, (half, 0.0, 0.0), rod),
            )
        )

    tip = EndEffector(name="tip", link_index=n_links - 1, xyz=(link_length, 0.0, 0.0))
    return RobotModel(name=f"chain{n_links}", links=tuple(links), end_effectors=(tip,))


__all__ = ["chain_model"]
