"""
contact-mech: contact Hamiltonian and Herglotz dynamics, Tulczyjew triples and
Legendrian submanifolds in Darboux coordinates.
"""
import pathlib
from typing import Union

from cloudpathlib import CloudPath
from cloudpathlib.anypath import to_anypath

# Config files and run outputs may live on local disk or in a bucket. AnyPath
# can't be used for type hinting (its constructor returns either a CloudPath or
# a pathlib.Path), so we alias the union for use in signatures:
Path = Union[CloudPath, pathlib.Path]

# ...and expose to_anypath under a friendlier name for parsing strings:
to_path = to_anypath
