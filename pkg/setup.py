"""
setup.py - this module makes the package installable
"""

from setuptools import setup, find_packages

NAME = "voronoicur"
VERSION = "0.1.0"
DEPENDENCIES = [
    "numpy",
    "scipy",
    "matplotlib",
    "h5py",
    "tqdm"
]
DESCRIPTION = (
    "Partition-based column subset selection and CUR decomposition "
    "with Voronoi-partitioned DEIM."
)
AUTHOR = "voronoicur developers"

setup(
    author=AUTHOR,
    description=DESCRIPTION,
    install_requires=DEPENDENCIES,
    name=NAME,
    version=VERSION,
    packages=find_packages(include=["voronoicur", "voronoicur.*"]),
    entry_points={"console_scripts": ["voronoicur = voronoicur.cli:main"]},
)
