from setuptools import find_packages, setup

setup(
    name="perturbed-hamiltonicity-lab",
    version="0.1.0",
    author="Abhishek Bisht",
    author_email="abhishekbisht.ac.in@gmail.com",
    description="Randomly perturbed graphs, digraphs, hypergraphs and tournaments: generators, solvers and Monte Carlo sweeps",
    packages=find_packages(exclude=["tests"]),
    py_modules=["settings", "main"],
    python_requires=">=3.10",
    install_requires=[
        "pydantic>=2.5",
        "python-dotenv>=1.0",
        "numpy>=1.26",
        "scipy>=1.11",
        "pandas>=2.0",
    ],
    extras_require={"test": ["pytest>=8.0", "hypothesis>=6.100", "networkx>=3.2"]},
    entry_points={"console_scripts": ["perturbed=main:main"]},
)
