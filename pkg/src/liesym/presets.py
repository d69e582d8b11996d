"""Built-in equations, available to the CLI as ``--preset NAME``."""

PRESETS = {
    # thin-walled viscoelastic tube model
    "viscoelastic-tube": "u_t + a*u*u_x + b*u_x3 + c*u_x4 + d*u_x5 = e*u_x2",
    "burgers": "u_t + u*u_x = u_x2",
    "kdv": "u_t + a*u*u_x + b*u_x3 = 0",
}


def preset(name: str) -> str:
    try:
        return PRESETS[name]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; choose from {', '.join(sorted(PRESETS))}") from None
