import os
import re

from setuptools import find_packages, setup

with open(os.path.join(os.path.dirname(__file__), "README.rst")) as readme:
    README = readme.read()

with open(os.path.join(os.path.dirname(__file__), "HISTORY.rst")) as history:
    HISTORY = history.read()

with open(os.path.join(os.path.dirname(__file__), "wlpcheck", "__init__.py")) as init:
    VERSION = re.search(r'^__version__ = "([^"]+)"', init.read(), re.MULTILINE).group(1)


def parse_requirements(path):
    """Return the requirement lines of ``path``, following ``-r`` includes."""
    result = []
    with open(os.path.join(os.path.dirname(__file__), path)) as inputf:
        for line in inputf:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            elif line.startswith("-r "):
                result += parse_requirements(os.path.join(os.path.dirname(path), line[3:]))
            else:
                result.append(line)
    return result


# allow setup.py to be run from any path
os.chdir(os.path.normpath(os.path.join(os.path.abspath(__file__), os.pardir)))

setup(
    name="wlpcheck",
    version=VERSION,
    packages=find_packages(),
    include_package_data=True,
    license="MIT",
    description="Verify the weak Lefschetz property of almost complete intersections of powers of "
    "general linear forms",
    long_description=README + "\n\n" + HISTORY,
    author="wlpcheck developers",
    install_requires=parse_requirements("requirements/base.txt"),
    extras_require={"sentry": ["sentry-sdk >=0.14.3"]},
    entry_points={"console_scripts": ["wlpcheck = wlpcheck.cli:main"]},
    python_requires=">=3.8",
    classifiers=[
        "Environment :: Console",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: MIT License",
        "Operating System :: POSIX :: Linux",
        "Programming Language :: Python",
        "Programming Language :: Python :: 3.8",
        "Programming Language :: Python :: 3.9",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
)
