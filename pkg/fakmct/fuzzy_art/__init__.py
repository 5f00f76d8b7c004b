from .kernels import activations, fuzzy_and_norm, learning_law
from .network import FuzzyArtNetwork, FuzzyArtParams, REJECT, choice, complement_code, learn, match, train
