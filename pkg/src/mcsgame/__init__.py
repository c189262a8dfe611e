"""Task selection game for time-sensitive, location-dependent crowdsensing."""

from .adts import AdtsConfig, AdtsTrace, ClaimBoard, apply_claim_update, run_adts
from .baselines import greedy_distributed
from .central import Allocation, exact_cta, greedy_centralized, surplus
from .game import StrategyProfile, deviation_delta, is_nash, payoff, potential
from .metrics import RunReport, coverage, evaluate, jain_index, reward_per_measurement
from .model import Scenario, ScenarioError, TaskTimePoint, eligible_set, rho_star
from .routing import Route, best_response, build_route_graph, enumerate_routes, validate_route
from .scenarios import GenConfig, generate, real_world_fixture

__version__ = "0.1.0"
