"""Semantic features of comments: lexicon counts and WordNet sense statistics."""

from .features import (
    FEATURE_NAMES,
    FeatureVector,
    count_lexicon,
    extract_features,
    format_features,
    parse_features,
    polarity_confidence,
    sense_combination,
    sense_count,
    sense_extremes,
)
from .lexicon import Lexicons, parse_opinion_lexicon, parse_subjectivity_clues
from .wordnet import SenseTaxonomy, Synset, load_wordnet, parse_wordnet, path_similarity
