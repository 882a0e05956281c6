from .dictionary import FeatureDictionary, FunctionDictionary, evaluate_model, jacobian_model
from .polynomial import PolynomialDictionary, graded_multi_indices, monomial_count, polynomial_dictionary
from .registry import (
    FourierDictionary,
    dictionary_from_descriptor,
    named_dictionary,
    register_dictionary,
    registered_names,
)
from .targets import StructuredTarget, linear_features_target, radial_features_target
