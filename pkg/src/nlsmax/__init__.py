"""Spectral toolkit for Strichartz-norm maximization of the mass-critical NLS.

Everything is built on the harmonic-oscillator eigenbasis (Hermite
functions normalized to ``||h_n||^2 = sqrt(pi)``) and Gauss-Hermite
quadrature.  Submodules:

- ``hermite``   -- basis functions, quadrature, grid <-> coefficient transforms
- ``gaussian``  -- the Gaussian datum, lens transform, harmonic propagator,
                   first-order Duhamel remainder
- ``quadform``  -- the second-variation quadratic form, its Gram matrix,
                   coercivity certificate, and combinatorial bounds
- ``constants`` -- C_S, D_1, D_2 with independent cross-checks
- ``sim``       -- Strang-split time integration in the harmonic frame and
                   the small-mass expansion experiment
- ``gauge``     -- symmetry-parameter residual map and Newton gauge fixing
- ``cli``       -- command-line front end emitting JSON reports
"""

__version__ = "0.1.0"
