# noqa: D100
from pathlib import Path

import setuptools

# Read the README file content using pathlib and a context manager
long_description = Path("README.md").read_text(encoding="utf-8").strip()

setuptools.setup(name="mpsched",
                 version="0.1.0",
                 long_description_content_type="text/markdown",
                 description="Discrete-event simulator for forward-delay-based multipath TCP packet scheduling",
                 long_description=long_description,
                 packages=setuptools.find_packages(exclude=["tests", "tests.*", "examples", "examples.*"]),
                 python_requires=">=3.10",
                 install_requires=["loguru", "async_timeout", "numpy"],
                 entry_points={"console_scripts": ["mpsched=mpsched.cli:main"]},
                 license="MIT License",
                 zip_safe=False,
                 keywords=["mptcp","multipath","packet scheduling","reordering","network simulation"],
                 classifiers=[    "Intended Audience :: Science/Research",
                            "Topic :: System :: Networking",
                            "License :: OSI Approved :: MIT License",
                            "Programming Language :: Python :: 3.10",
                            "Programming Language :: Python :: 3.11",
                            "Programming Language :: Python :: 3.12",
                            "Natural Language :: English",
                            "Operating System :: OS Independent"])
