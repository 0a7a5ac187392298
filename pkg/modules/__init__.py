"""Spherical interpolation library: quaternion algebra, SLERP/SQUAD, SIDER-n and SENO-n."""
