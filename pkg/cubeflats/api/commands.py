import json
import logging
from argparse import Namespace

import networkx as nx
from pydantic import BaseModel

from cubeflats.api.dependencies import (
    load_complex_file,
    load_isometry_file,
    parse_cover_spec,
    parse_shape,
    parse_vector,
    parse_word_pair,
    write_output
)
from cubeflats.config import get_settings
from cubeflats.core.builders import build_grid
from cubeflats.core.complex import dump_complex
from cubeflats.core.exceptions import InputError
from cubeflats.core.links import check_npc, graph_to_dot, one_skeleton, vertex_link
from cubeflats.middleware.error_handler import EXIT_OK, EXIT_VERDICT
from cubeflats.models.complex import CubeComplex
from cubeflats.models.schemas import AnalysisReport
from cubeflats.services.cone import build_cone_plane, classify_universal_cover
from cubeflats.services.constructions import branched_cover, build_torus, find_pythagorean_doubles, lift_report
from cubeflats.services.develop import default_seed, develop, development_graph
from cubeflats.services.isometry import (
    is_cubical_map,
    normal_form,
    preserves_proper_hypersurface,
    product_structure,
    require_orthogonal
)

logger = logging.getLogger(__name__)
settings = get_settings()


# ==============================================================================
# OUTPUT HELPERS
# ==============================================================================

def _json(payload) -> str:
    if isinstance(payload, BaseModel):
        payload = payload.model_dump(mode="json")
    return json.dumps(payload, indent=settings.JSON_INDENT, sort_keys=True)


def skeleton_graph(complex_: CubeComplex) -> nx.Graph:
    """Vertices and edges of a cube complex."""
    graph = nx.Graph()
    graph.add_nodes_from(cell.id for cell in complex_.cells_of_dim(0))
    graph.add_edges_from(tuple(ref.id for ref in edge.facets) for edge in complex_.cells_of_dim(1))
    return graph


def _emit_complex(complex_: CubeComplex, args: Namespace, name: str) -> None:
    if args.format == "dot":
        write_output(graph_to_dot(skeleton_graph(complex_), name=name), args.output)
    else:
        write_output(dump_complex(complex_), args.output)


# ==============================================================================
# SUBCOMMANDS
# ==============================================================================

def cmd_check(args: Namespace) -> int:
    """Link condition at every vertex, or the link of one vertex with --vertex."""
    complex_ = load_complex_file(args.input)
    if args.vertex:
        link = vertex_link(complex_, args.vertex)
        if args.format == "dot":
            write_output(graph_to_dot(one_skeleton(link), name=f"lk({args.vertex})"), args.output)
        else:
            write_output(_json(link), args.output)
        return EXIT_OK

    report = check_npc(complex_)
    write_output(_json(report), args.output)
    return EXIT_OK if report.npc else EXIT_VERDICT


def cmd_analyze(args: Namespace) -> int:
    """Normal form, cubicality, hypersurface preservation and product structure of an isometry."""
    tau = require_orthogonal(load_isometry_file(args.input))
    cubical = is_cubical_map(tau)
    report = AnalysisReport(
        isometry=tau,
        cubical=cubical,
        normal_form=normal_form(tau),
        hypersurface=preserves_proper_hypersurface(tau),
        product_structure=None if cubical else product_structure(tau)
    )
    logger.info(f"Analyzed {tau.n}-dimensional isometry: cubical={cubical}")
    write_output(_json(report), args.output)
    return EXIT_OK


def cmd_develop(args: Namespace) -> int:
    complex_ = load_complex_file(args.input)
    tau = load_isometry_file(args.isometry)
    origin = parse_vector(args.origin, tau.n) if args.origin else None
    seed = default_seed(complex_, args.seed, origin)
    radius = args.radius if args.radius is not None else settings.DEFAULT_DEVELOP_RADIUS

    result = develop(complex_, seed, tau, radius)
    if args.format == "dot":
        write_output(graph_to_dot(development_graph(complex_, result), name=f"development({args.seed})"), args.output)
    else:
        write_output(_json(result), args.output)
    return EXIT_OK


def cmd_classify(args: Namespace) -> int:
    """Cone orders, Gauss-Bonnet data and the quasi-isometry type of the universal cover."""
    report = classify_universal_cover(load_complex_file(args.input))
    write_output(_json(report), args.output)
    return EXIT_VERDICT if report.classification == "Invalid" else EXIT_OK


def cmd_generate(args: Namespace) -> int:
    kind = args.kind
    if kind == "cone":
        if args.n is None:
            raise InputError("generate cone needs --n")
        radius = args.radius if args.radius is not None else settings.DEFAULT_CONE_RADIUS
        _emit_complex(build_cone_plane(args.n, radius), args, f"Cone({args.n})")

    elif kind == "grid":
        shape = parse_shape(args.shape or "3,3")
        _emit_complex(build_grid(shape), args, "grid")

    elif kind == "doubles":
        if args.format == "dot":
            raise InputError("generate doubles has no DOT output")
        limit = args.limit if args.limit is not None else settings.DEFAULT_DOUBLES_LIMIT
        pairs = find_pythagorean_doubles(limit)
        write_output(_json([pair.model_dump(mode="json") for pair in pairs]), args.output)

    elif kind in ("torus", "cover"):
        if not args.a or not args.b:
            raise InputError(f"generate {kind} needs --a and --b")
        torus = build_torus(parse_vector(args.a, 2), parse_vector(args.b, 2))
        if kind == "torus":
            _emit_complex(torus.surface, args, "torus")
            return EXIT_OK

        spec = parse_cover_spec(args.sigma_a or "id", args.sigma_b or "id", args.degree)
        if args.lift:
            if args.format == "dot":
                raise InputError("--lift reports have no DOT output")
            write_output(_json(lift_report(spec, parse_word_pair(args.lift))), args.output)
            return EXIT_OK
        cover = branched_cover(torus, spec)
        _emit_complex(cover.surface, args, "cover")

    else:
        raise InputError(f"unknown generator {kind!r}")
    return EXIT_OK
