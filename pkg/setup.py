#!/usr/bin/env python
"""Install sdsforge."""

from setuptools import setup
from setuptools import find_packages


with open("README.md") as readme_fp:
    readme = readme_fp.read()

setup(
    name="sdsforge",
    use_scm_version=True,
    description="Diffusion-guided domain adaptation of toy style-based generators.",
    long_description=readme,
    long_description_content_type="text/markdown",
    keywords=[
        "diffusion",
        "score",
        "distillation",
        "guidance",
        "generator",
        "adaptation",
        "style",
        "toy",
        "sdsforge",
    ],
    license="MIT",
    packages=find_packages(exclude=["tests", "docs"]),
    python_requires=">=3.9",
    install_requires=["importlib_metadata", "numpy", "pyyaml", "scipy"],
    setup_requires=["packaging", "pytest-runner", "setuptools_scm"],
    tests_require=["pytest >= 6.2"],
    entry_points="""
      [console_scripts]
      sdsforge = sdsforge.__main__:main
      [sdsforge.distributions]
      gaussian = sdsforge.distributions.gaussian
      moons = sdsforge.distributions.moons
      ring = sdsforge.distributions.ring
    """,
    classifiers=[
        "Development Status :: 3 - Alpha",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
        "Programming Language :: Python",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Intended Audience :: Science/Research",
        "Topic :: Scientific/Engineering :: Artificial Intelligence",
    ],
)
