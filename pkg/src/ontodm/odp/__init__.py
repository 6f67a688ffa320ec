from .library import (ODP_IDS, PROJECT_NAMESPACE, AlignmentAxiom, DanglingIriError,
                      DuplicateRelationError, Lwo, Mechanism, Odp, OdpError, UnknownOdpError,
                      align, attribute_class_iris, compose_lwo, format_alignments,
                      load_alignments, load_odp, mechanism_triples, parse_alignments)
from .requirements import (CompetencyQuestion, OntologyRequirementSpec, RequirementError,
                           UserStory, load_requirements, load_user_stories)

__all__ = [
    "ODP_IDS", "PROJECT_NAMESPACE", "AlignmentAxiom", "CompetencyQuestion", "DanglingIriError",
    "DuplicateRelationError", "Lwo", "Mechanism", "Odp", "OdpError", "OntologyRequirementSpec",
    "RequirementError", "UnknownOdpError", "UserStory", "align", "attribute_class_iris",
    "compose_lwo", "format_alignments", "load_alignments", "load_odp", "load_requirements",
    "load_user_stories", "mechanism_triples", "parse_alignments",
]
