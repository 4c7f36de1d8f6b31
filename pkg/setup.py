from setuptools import setup

with open("README.md", "r", encoding="utf-8") as fh:
    long_description = fh.read()

setup(
    name="fdnorm",
    version="0.1.0",
    description="Functional dependency analysis: normal forms, legitimate 2NF/3NF decompositions and precise 2NF diagnosis",
    long_description=long_description,
    long_description_content_type="text/markdown",
    py_modules=[
        "fd_errors",
        "fd_config",
        "fd_model",
        "fd_closure",
        "verification",
        "normal_forms",
        "chain_diagnosis",
        "decomposition",
        "fd_parser",
        "fd_generators",
        "fdnorm_sdk",
        "fdnorm_cli",
    ],
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Intended Audience :: Developers",
        "Intended Audience :: Education",
        "Topic :: Database",
        "License :: OSI Approved :: MIT License",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.8",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
    ],
    python_requires=">=3.8",
    install_requires=[
        "networkx>=3.1",
        "pandas>=1.5",
    ],
    extras_require={
        "test": ["pytest>=7.0"],
    },
    entry_points={
        "console_scripts": [
            "fdnorm=fdnorm_cli:main",
        ],
    },
)
