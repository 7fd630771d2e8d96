from tagdebt.detection.base import (
    Classification,
    ClassificationInput,
    Detector,
    DetectorError,
    Verdict,
    select_text,
)
from tagdebt.detection.heuristic import HeuristicDetector, heuristic_classify, load_lexicon
from tagdebt.detection.llm import LlmDetector, llm_classify
from tagdebt.detection.metrics import Metrics, evaluate_detector, load_corpus
from tagdebt.detection.registry import (
    DuplicatePlugin,
    PluginRegistry,
    RegistryFrozen,
    UnknownPluginType,
    create_detector,
    default_registry,
    register_plugin,
)
from tagdebt.detection.rest import RestDetector, remote_classify

__all__ = [
    "Classification",
    "ClassificationInput",
    "Detector",
    "DetectorError",
    "DuplicatePlugin",
    "HeuristicDetector",
    "LlmDetector",
    "Metrics",
    "PluginRegistry",
    "RegistryFrozen",
    "RestDetector",
    "UnknownPluginType",
    "Verdict",
    "create_detector",
    "default_registry",
    "evaluate_detector",
    "heuristic_classify",
    "llm_classify",
    "load_corpus",
    "load_lexicon",
    "register_plugin",
    "remote_classify",
    "select_text",
]
