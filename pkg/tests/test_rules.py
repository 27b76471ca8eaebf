"""
Unit Tests for the rule language: parser, printer, binder, plan lowering and
the compiled evaluator checked against the brute-force reference.
"""

import numpy as np
import pytest

from conftest import random_scene
from src.utils.exceptions import (
    BindError,
    RuleSyntaxError,
    UnboundVariableError,
    UnknownPredicateError,
)
from src.utils.logic import (
    FUZZY_FAMILIES,
    ExistsMode,
    Family,
    ForallMode,
    ImplicationStyle,
    LogicSystem,
    TruthValue,
    impl,
    reduce_forall,
)
from src.utils.masks import BoundingBox, ScalingPolicy, TruthMask, boxes_to_mask
from src.utils.rules import (
    And,
    DenoiseGuard,
    ForAll,
    Implies,
    MembershipForm,
    NodeOp,
    Or,
    Predicate,
    bind,
    evaluate,
    evaluate_pixelwise,
    lower,
    parse,
    parse_file,
    predicate_names,
    print_formula,
    reference_evaluate,
    rename_predicates,
)
from src.utils.storage import SceneBundle

PRODUCT = LogicSystem(family=Family.PRODUCT)


def compile_rule(formula, scene, logic=PRODUCT, **bind_args):
    bound = bind(formula, scene.manifest, **bind_args)
    return bound, lower(bound, logic)


class TestParser:
    """Test rule parsing."""

    def test_precedence(self):
        """! binds tighter than &, & tighter than |, | tighter than ->."""
        f = parse("forall p in P: a(p) & b(p) | c(p) -> d(p)")
        a, b, c, d = (Predicate(n, "p") for n in "abcd")
        assert f == ForAll("p", "P", Implies(Or(And(a, b), c), d))

    def test_implication_is_right_associative(self):
        """x -> y -> z reads as x -> (y -> z)."""
        f = parse("x(p) -> y(p) -> z(p)")
        assert f == Implies(
            Predicate("x", "p"), Implies(Predicate("y", "p"), Predicate("z", "p"))
        )

    def test_implication_style_annotation(self):
        """->[R] and ->[S] pin the implication style."""
        f = parse("forall p in P: eye(p) ->[R] person(p)")
        assert f.body.style == ImplicationStyle.R

    def test_comments_and_whitespace(self):
        """Comments and newlines are ignored."""
        f = parse("# header\nforall p in P:\n    arm(p)  # trailing\n")
        assert f == ForAll("p", "P", Predicate("arm", "p"))

    def test_denoise_argument(self):
        """denoise=t wraps the predicate in a guard."""
        f = parse("arm(p, denoise=0.005)")
        assert f == DenoiseGuard(0.005, Predicate("arm", "p"))

    def test_syntax_error_position(self):
        """Lexical errors report 1-based line and column."""
        with pytest.raises(RuleSyntaxError) as info:
            parse("forall p in P:\n  arm(p) $ person(p)")
        assert info.value.line == 2
        assert info.value.column == 10

    def test_unexpected_end(self):
        """A dangling connective is a syntax error."""
        with pytest.raises(RuleSyntaxError):
            parse("forall p in P: arm(p) &")

    def test_bound_twice(self):
        """A variable bound by two enclosing quantifiers is rejected."""
        with pytest.raises(RuleSyntaxError):
            parse("forall p in P: exists p in P: arm(p)")

    def test_unbound_variables(self):
        """Free variables must be declared; by default one is allowed."""
        with pytest.raises(UnboundVariableError):
            parse("forall p in P: arm(q)", free=())
        with pytest.raises(UnboundVariableError):
            parse("arm(p) & leg(q)")
        with pytest.raises(UnboundVariableError) as info:
            parse("arm(p) & leg(q)", free=("p",))
        assert info.value.variable == "q"
        assert parse("arm(p) & leg(q)", free=("p", "q")) is not None

    @pytest.mark.parametrize(
        "text",
        [
            "closeby(p, q, ksize=4)",
            "closeby(p, q, r=2)",
            "closeby(p, q, ksize=3, sigma=1)",
            "closeby(p, q, trivial, sigma=1)",
            "closeby(p)",
            "arm(p, q)",
            "arm(p, colour=1)",
        ],
    )
    def test_invalid_applications(self, text):
        """Malformed closeby and predicate applications are syntax errors."""
        with pytest.raises(RuleSyntaxError):
            parse(text, free=("p", "q"))


class TestPrinter:
    """Test canonical printing."""

    def test_round_trip_over_corpus(self, rule_files):
        """parse(print(f)) == f and printing is a fixpoint for every corpus rule."""
        assert len(rule_files) >= 20
        for path in rule_files:
            f = parse_file(path)
            text = print_formula(f)
            assert parse(text) == f, path.name
            assert print_formula(parse(text)) == text, path.name

    def test_quantifier_operand_is_parenthesized(self):
        """A quantifier left of a connective needs parentheses."""
        f = parse("(exists p in P: eye(p)) & (exists q in P: arm(q))")
        text = print_formula(f)
        assert text == "(exists p in P: eye(p)) & exists q in P: arm(q)"
        assert parse(text) == f


class TestTransform:
    """Test AST rewrites."""

    def test_rename_predicates(self):
        """Renamed predicates point at other channels; others stay."""
        f = parse("forall p in P: arm(p) -> person(p)")
        renamed = rename_predicates(f, {"arm": "arm_cal"})
        assert predicate_names(renamed) == {"arm_cal", "person"}
        assert predicate_names(f) == {"arm", "person"}


class TestBinder:
    """Test binding against scene manifests."""

    def test_unknown_predicate(self, rng):
        """Predicates need a manifest channel."""
        scene = random_scene(rng)
        with pytest.raises(UnknownPredicateError):
            bind(parse("forall p in P: torso(p)"), scene.manifest)

    def test_denoise_wraps_mask_predicates_only(self, rng):
        """Global denoising guards mask channels, box channels stay raw."""
        scene = random_scene(rng)
        bound = bind(parse("forall p in P: arm(p) -> person(p)"), scene.manifest, denoise=0.005)
        assert bound.formula.body.left == DenoiseGuard(0.005, Predicate("arm", "p"))
        assert bound.formula.body.right == Predicate("person", "p")

    def test_grid_shapes(self):
        """Upscaling targets the image size, downscaling the smallest channel."""
        scene = SceneBundle.from_channels(
            "mixed",
            (8, 8),
            masks={"arm": TruthMask.full((4, 4), 0.5)},
            boxes={"person": [BoundingBox(x0=0, y0=0, x1=4, y1=4)]},
        )
        f = parse("forall p in P: arm(p) -> person(p)")
        assert bind(f, scene.manifest).grid_shape == (8, 8)
        assert bind(f, scene.manifest, ScalingPolicy.DOWNSCALE).grid_shape == (4, 4)

    def test_irreconcilable_downscale(self):
        """Non-integer block factors fail at bind time."""
        scene = SceneBundle.from_channels(
            "odd",
            (8, 8),
            masks={"arm": TruthMask.full((3, 3), 0.5), "leg": TruthMask.full((8, 8), 0.5)},
        )
        with pytest.raises(BindError):
            bind(parse("forall p in P: arm(p) | leg(p)"), scene.manifest, ScalingPolicy.DOWNSCALE)


class TestLowering:
    """Test plan construction."""

    def test_plan_wiring_is_independent_of_family(self, rng, rule_files):
        """Fuzzy families change node semantics, never wiring."""
        scene = random_scene(rng)
        for path in rule_files:
            bound = bind(parse_file(path), scene.manifest)
            structures = {
                lower(bound, LogicSystem(family=fam)).structure() for fam in FUZZY_FAMILIES
            }
            assert len(structures) == 1, path.name

    def test_windowed_kernels_are_recognized(self, rng):
        """closeby patterns lower to windowed kernels, not pairwise nodes."""
        scene = random_scene(rng)
        cases = {
            "forall p in P: wrist(p) -> exists q in P: person(q) & closeby(p, q, ksize=3)":
                NodeOp.CLOSE_TO_A,
            "forall p in P: person(p) -> forall q in P: closeby(p, q, ksize=3) -> !leg(q)":
                NodeOp.CLOSE_FORALL,
        }
        for text, op in cases.items():
            _, plan = compile_rule(parse(text), scene)
            ops = {node.op for node in plan.nodes}
            assert op in ops
            assert NodeOp.PAIRWISE not in ops

    def test_pairwise_fallback(self, rng):
        """Other two-variable bodies fall back to pairwise evaluation."""
        scene = random_scene(rng)
        text = "forall p in P: exists q in P: arm(p) & person(q) & closeby(p, q, ksize=3)"
        _, plan = compile_rule(parse(text), scene)
        assert NodeOp.PAIRWISE in {node.op for node in plan.nodes}

    def test_boolean_inserts_binarize(self, rng):
        """Only Boolean logic adds binarize nodes."""
        scene = random_scene(rng)
        f = parse("forall p in P: arm(p) -> person(p)")
        _, fuzzy = compile_rule(f, scene)
        _, crisp = compile_rule(f, scene, LogicSystem(family=Family.BOOLEAN))
        assert NodeOp.BINARIZE not in {n.op for n in fuzzy.nodes}
        assert NodeOp.BINARIZE in {n.op for n in crisp.nodes}


def _oracle_logics():
    for family in (*FUZZY_FAMILIES, Family.BOOLEAN):
        for style in ImplicationStyle:
            yield LogicSystem(family=family, implication_style=style)
    yield LogicSystem(
        family=Family.LUKASIEWICZ,
        forall_mode=ForallMode.TNORM_REDUCE,
        exists_mode=ExistsMode.TCONORM_REDUCE,
    )
    yield LogicSystem(family=Family.PRODUCT, exists_mode=ExistsMode.MEAN)


class TestCompilerOracle:
    """Compiled plans agree with the brute-force reference interpreter."""

    N_SCENES = 100

    @pytest.mark.parametrize("membership_form", list(MembershipForm))
    def test_corpus_matches_reference(self, rule_files, membership_form):
        """Every corpus rule on random scenes up to 32x32; logic variants rotate per scene."""
        rng = np.random.default_rng(99)
        logics = list(_oracle_logics())
        formulas = [(path.name, parse_file(path)) for path in rule_files]
        for i in range(self.N_SCENES):
            shape = tuple(int(s) for s in rng.integers(2, 33, size=2))
            scene = random_scene(rng, shape, f"s{i}")
            logic = logics[i % len(logics)]
            for name, formula in formulas:
                bound = bind(formula, scene.manifest, membership_form=membership_form)
                got = evaluate(lower(bound, logic), scene)
                want = reference_evaluate(bound, logic, scene)
                label = f"{name} {shape} {logic.describe()}"
                if isinstance(want, TruthMask):
                    assert isinstance(got, TruthMask), label
                    assert got.allclose(want, atol=1e-6), label
                else:
                    assert isinstance(got, TruthValue), label
                    assert got == pytest.approx(want, abs=1e-6), label

    def test_denoised_binding_matches_reference(self, rule_files):
        """Globally denoised bindings agree as well."""
        rng = np.random.default_rng(5)
        scene = random_scene(rng, (8, 8))
        for path in rule_files:
            bound = bind(parse_file(path), scene.manifest, denoise=0.3)
            got = evaluate(lower(bound, PRODUCT), scene)
            want = reference_evaluate(bound, PRODUCT, scene)
            if isinstance(want, TruthMask):
                assert got.allclose(want, atol=1e-6), path.name
            else:
                assert got == pytest.approx(want, abs=1e-6), path.name


class TestEvaluation:
    """Test result kinds and pixelwise output."""

    def test_pixelwise_mask(self, rng):
        """The pixel mask of forall p in P: F(p) is F, and its mean is the rule value."""
        scene = random_scene(rng)
        _, plan = compile_rule(parse("forall p in P: arm(p) -> person(p)"), scene)
        person = boxes_to_mask(scene.box_set("person"), scene.image_shape, PRODUCT)
        expected = impl(scene.mask("arm").array, person.array, PRODUCT)

        mask = evaluate_pixelwise(plan, scene)
        np.testing.assert_allclose(mask.array, expected, atol=1e-12)
        assert evaluate(plan, scene) == pytest.approx(reduce_forall(expected, PRODUCT))

    def test_open_rule_gives_mask(self, rng):
        """Open rules evaluate to a mask."""
        scene = random_scene(rng)
        _, plan = compile_rule(parse("arm(p) & !person(p)"), scene)
        assert isinstance(evaluate(plan, scene), TruthMask)
        assert evaluate_pixelwise(plan, scene).shape == scene.image_shape

    def test_closed_rule_without_pixel_body(self, rng):
        """An existential rule has no pixelwise form."""
        scene = random_scene(rng)
        _, plan = compile_rule(parse("exists p in P: eye(p)"), scene)
        assert isinstance(evaluate(plan, scene), TruthValue)
        with pytest.raises(BindError):
            evaluate_pixelwise(plan, scene)

    def test_vacuous_truth_on_empty_region(self):
        """forall over an empty region is 1, exists is 0."""
        scene = SceneBundle.from_channels(
            "empty", (4, 4), masks={"arm": TruthMask.full((4, 4), 0.3)}, boxes={"person": []}
        )
        _, forall_plan = compile_rule(parse("forall p in person: arm(p)"), scene)
        _, exists_plan = compile_rule(parse("exists p in person: arm(p)"), scene)
        assert evaluate(forall_plan, scene) == 1.0
        assert evaluate(exists_plan, scene) == 0.0


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
