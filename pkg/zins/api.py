"""Root module for the zins short rate simulation toolbox
"""
import zins.model as model
import zins.scheme as scheme
import zins.montecarlo as montecarlo
import zins.truncation as truncation
import zins.chain as chain
from zins.model import ModelSpec, RegimeParams, validate_assumptions
from zins.chain import GeneratorMatrix, matrix_exponential
from zins.truncation import TruncationPolicy, make_policy
from zins.scheme import PathStream, simulate_tem_path, simulate_bem_path
from zins.montecarlo import bond_price, barrier_option_price, strong_error
from zins.time import clock, Clock
