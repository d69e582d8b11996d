"""Reference results for the viscoelastic-tube equation, transcribed by hand.

Everything is stored as DSL text and compared after parsing, so spacing and
term order do not matter.
"""

GOLDEN = {
    # infinitesimals of the general symmetry with free constants c1, c2, c3
    "general_element": {"xi": "c2*a*t + c3", "eta": "c1", "phi": "c2"},
    # generators of the symmetry algebra
    "generators": [
        {"xi": "1", "eta": "0", "phi": "0"},
        {"xi": "0", "eta": "1", "phi": "0"},
        {"xi": "t", "eta": "0", "phi": "1/a"},
    ],
    # commutator table, row i column j holds [v_i, v_j]
    "commutators": [
        ["0", "0", "0"],
        ["0", "0", "v1"],
        ["0", "-v1", "0"],
    ],
    # adjoint table, row i column j holds Ad(exp(eps v_i)) v_j
    "adjoint": [
        ["v1", "v2", "v3"],
        ["v1", "v2", "v3 - eps*v1"],
        ["v1", "v2 + eps*v1", "v3"],
    ],
    # reference one-dimensional optimal system; alpha ranges over the rationals
    "optimal": ["v2", "v3 + alpha*v2"],
    # reductions: generator, invariants and reduced ODE (up to a constant factor)
    "reductions": [
        {
            "label": "galilean",
            "generator": "v3",
            "chi": "t",
            "zeta": "u - x/(a*t)",
            "ode": "zeta_chi + zeta/chi",
        },
        {
            "label": "travelling-wave",
            "generator": "v2 + c0*v1",
            "chi": "x - c0*t",
            "zeta": "u",
            "ode": "-c0*zeta_chi + a*zeta*zeta_chi + b*zeta_chi3 + c*zeta_chi4 + d*zeta_chi5 - e*zeta_chi2",
        },
        {
            # as recorded this still carries an explicit t; the engine's form drops it
            "label": "mixed",
            "generator": "v3 + beta*v2",
            "chi": "x - t^2/(2*beta)",
            "zeta": "u - t/(a*beta)",
            "ode": "1/(a*beta) - (t/beta)*zeta_chi + a*zeta*zeta_chi + b*zeta_chi3 + c*zeta_chi4"
                   " + d*zeta_chi5 - e*zeta_chi2",
            "explicit_terms_cancel": True,
        },
        {
            "label": "stationary",
            "generator": "v2",
            "chi": "x",
            "zeta": "u",
            "ode": "a*zeta*zeta_chi + b*zeta_chi3 + c*zeta_chi4 + d*zeta_chi5 - e*zeta_chi2",
        },
        {
            "label": "translation",
            "generator": "v1",
            "chi": "t",
            "zeta": "u",
            "ode": "zeta_chi",
        },
    ],
    # Galilean-invariant solution
    "solution": "(x + a*c1)/(a*t)",
}
