  # noqa: D104
