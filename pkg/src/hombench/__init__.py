"""Exact computational homological algebra over finite-dimensional algebras.

Subpackages, bottom to top of the dependency chain:

- ``linalg``     exact matrices over F_p
- ``algebra``    finite-dimensional algebras, modules, abelian-category kit
- ``homology``   covers, envelopes, syzygies, Ext, precovers, resolutions
- ``cotorsion``  object classes, cotorsion pairs and triplets
- ``balance``    balanced pairs and their relation to triplets
- ``quiverrep``  representations of finite acyclic quivers
- ``harness``    built-in algebras, scenario runner, CLI
"""

__version__ = "0.1.0"
