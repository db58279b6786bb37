from setuptools import setup, find_packages
from os import path

here = path.abspath(path.dirname(__file__))
with open(path.join(here, "README.md"), encoding="utf-8") as f:
    long_description = f.read()

with open("shapeservo/__init__.py", "r") as fp:
    # binds local __version__ to the line that look like  "__version__ = '0.1.0'"
    exec(next(line for line in fp if "__version__" in line))

setup(
    name="shapeservo",
    version=__version__,
    description="Model-free shape servoing of planar deformable and rigid objects.",
    long_description=long_description,
    long_description_content_type="text/markdown",
    python_requires=">=3.8",
    packages=find_packages(exclude=["tests"]),
    keywords=["robotics", "visual servoing", "deformable objects", "PCA"],
    install_requires=["numpy", "pandas", "scipy"],
    entry_points={"console_scripts": ["shapeservo=shapeservo.harness.cli:main"]},
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Intended Audience :: Science/Research",
        "Intended Audience :: Developers",
        "Topic :: Scientific/Engineering",
        "License :: OSI Approved :: BSD License",
        "Programming Language :: Python :: 3.8",
    ],
)
