"""spokeseq: exact spectral-sequence calculator for spoke-graded rings over F_p.

Modules:
    fp           exact sparse linear algebra over prime fields
    grading      the m + n@ degree lattice and tri-gradings
    algebra      presented graded-commutative algebras and monomial bases
    hfp          closed-form homotopy of the point ring (all variants)
    hopf         Hopf algebroids, comodules, axiom checks, Weyl combinatorics
    cobar        cobar complexes and Ext tables (two independent routes)
    mayss        the May spectral sequence and the completeness verdict
    charts       deterministic SVG chart emission
    cli          command-line driver
"""

__version__ = "0.1.0"
