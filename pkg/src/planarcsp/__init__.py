"""Lab for two unsatisfiable planar CSPs and their query complexity.

Subpackages cover the generic nogood calculus (`csp`), the triangle
coloring problem and its adversary (`sperner`), the arrow-field problem
with rotation calculus and its adversary (`arrows`), the query game
harness (`game`), grid search-problem reductions (`ppad`), reporting
(`report`), the command line front end (`cli`) and the HTTP game
service (`service`).
"""

__version__ = "0.1.0"
