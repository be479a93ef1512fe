"""Grid simulator for a single-equation bushfire model."""
