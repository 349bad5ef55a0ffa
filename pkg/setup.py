"""
Setup script for gapstress.
"""

from setuptools import setup, find_packages

with open("README.md", "r", encoding="utf-8") as f:
    long_description = f.read()

with open("requirements.txt", "r", encoding="utf-8") as f:
    requirements = [line.strip() for line in f if line.strip() and not line.startswith("#")]

setup(
    name="gapstress",
    version="0.1.0",
    author="gapstress developers",
    description="Stress concentration asymptotics between nearly touching rigid inclusions",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=find_packages(exclude=["tests", "tests.*"]),
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Topic :: Scientific/Engineering :: Mathematics",
        "Topic :: Scientific/Engineering :: Physics",
    ],
    python_requires=">=3.9",
    install_requires=requirements,
    extras_require={
        "cholmod": ["scikit-sparse>=0.4.12"],
        "dev": ["pytest>=7.4.0", "black>=23.11.0", "isort>=5.12.0", "mypy>=1.7.0"],
    },
    entry_points={
        "console_scripts": [
            "gapstress=gapstress.cli.main:main",
        ],
    },
)
