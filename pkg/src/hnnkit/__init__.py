"""hnnkit: classification, genus certificates and finite-quotient
fingerprints for HNN-extensions of finite base groups."""

from .errors import (AlphaDoesNotPreserveH, BadParams, BaseMismatch,
                     CapExceeded, EmptyIsoSet, HnnkitError,
                     HypothesisNotVerified, InfiniteBaseUnsupported,
                     NoIdentity, NoInverse, NotASubgroup, NotAssociative,
                     NotConjugate, ParseError, UnknownName)
from .groups import (FiniteGroup, Subgroup, SubgroupClass, all_subgroups,
                     center, centralizer, conjugacy_classes_of_subgroups,
                     cyclic, dicyclic, dihedral, direct_product,
                     elementary_abelian, group_from_json, group_to_json,
                     is_conjugate_subgroups, make_group_from_table,
                     named_group, normalizer, same_table, semidirect_cyclic,
                     subgroup, subgroup_closure, symmetric, alternating)
from .morphisms import (GroupMap, OutGroup, RestrictionImages, aut_group,
                        auts_preserving, conj_map, enumerate_homs,
                        enumerate_isomorphisms, generating_sequence,
                        generating_subset_auts, hom_count, identity_map,
                        isomorphic_groups, restrict_to_subgroup,
                        restriction_images, subgroup_generated_auts)
from .hnn import (CatalogEntry, GammaBarGroup, HnnData, HnnIsoWitness,
                  KInvariantReport, PairOrbitCatalog, abstract_iso,
                  build_gamma_bar, closed_form_central_cyclic,
                  closed_form_g1, compose_witness, double_coset_count,
                  gamma_action, hnn_data, hnn_from_json, hnn_isomorphic,
                  hnn_to_json, identity_witness, invert_witness,
                  iso_class_count, iso_parent_tuples, k_invariant,
                  kappa_partition, normalize_hnn, pair_orbit_catalog,
                  pairwise_iso_partition, total_iso_count, verify_witness)
from .genus import (GenusCheck, GenusReport, NOutData, genus_in_class_A,
                    genus_report, genus_report_from_json, n_out_image)
from .fingerprint import (FingerprintComparison, FingerprintVector,
                          ProbeSet, compare_fingerprints, default_probes,
                          fingerprint, fingerprint_from_json, hom_count_hnn,
                          separating_probe)

__version__ = "0.1.0"
