import setuptools
from distutils.core import setup

# read the contents of README.md
from os import path

this_directory = path.abspath(path.dirname(__file__))
with open(path.join(this_directory, "README.md"), encoding="utf-8") as f:
    long_description = f.read()

install_requires = [
    "numpy >= 1.17",
    "scipy >= 1.4",
]

setup(
    name="Zins",
    version="v0.1.0",
    description="Simulation of hybrid short rate models with delayed volatility, regime switching and jumps.",
    long_description=long_description,
    long_description_content_type="text/markdown",
    license="MIT",
    include_package_data=True,
    packages=[
        "zins",
        "zins._model",
        "zins._scheme",
        "zins._montecarlo",
        "zins._cli",
        "zins.examples",
    ],
    python_requires=">=3.7",
    install_requires=install_requires,
    extras_require={"test": ["pytest", "pytest-cov"]},
    entry_points={"console_scripts": ["zins=zins._cli.__main__:main"]},
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Environment :: Console",
        "Intended Audience :: Financial and Insurance Industry",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
        "Programming Language :: Python :: 3.7",
        "Programming Language :: Python :: 3.8",
        "Topic :: Office/Business :: Financial",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
)
