"""
Protocol circuits and the identity catalog
"""

from .catalog import CATALOG, CatalogEntry, list_identities, verify_all, verify_identity
from .verifiers import check_tl_relations, swap_verify, teleport_verify

__all__ = [
    'CATALOG',
    'CatalogEntry',
    'list_identities',
    'verify_all',
    'verify_identity',
    'check_tl_relations',
    'swap_verify',
    'teleport_verify',
]
