"""Structure-mapping analogy: domains, match hypotheses, SME-style merging
and the GIBSON greedy engine."""
from .domain import Domain, DomainBuilder, DomainError, Element, PredicateDecl, isomorphic
from .dsl import CorpusError, ParseDiagnostic, ParseResult, load_corpus, parse_corpus, serialize, serialize_corpus
from .generator import GeneratorError, GeneratorSpec, generate_domain
from .gibson import GibsonResult, GibsonScore, best_map_potential, gibson_map, identity_pairs, self_map
from .mapper import GMap, PMap, PMapBudgetExceeded, build_pmaps, greedy_merge, optimal_merge, ses
from .matcher import GIBSON_RULES, SME_RULES, MatchHypothesis, MatchSet, RuleSet, generate_matches
from .report import RunReport, percent_correct

__version__ = "0.1.0"

__all__ = [
    "CorpusError", "Domain", "DomainBuilder", "DomainError", "Element", "GIBSON_RULES", "GMap",
    "GeneratorError", "GeneratorSpec", "GibsonResult", "GibsonScore", "MatchHypothesis", "MatchSet",
    "PMap", "PMapBudgetExceeded", "ParseDiagnostic", "ParseResult", "PredicateDecl", "RuleSet",
    "RunReport", "SME_RULES", "best_map_potential", "build_pmaps", "generate_domain",
    "generate_matches", "gibson_map", "greedy_merge", "identity_pairs", "isomorphic", "load_corpus",
    "optimal_merge", "parse_corpus", "percent_correct", "self_map", "serialize", "serialize_corpus",
    "ses",
]
