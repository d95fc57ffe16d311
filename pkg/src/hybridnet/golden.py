"""Reference curve datasets and reproduction reports.

The tables below are the figure-embedded data series bundled with the
project, keyed by figure id: 3 (coverage vs simultaneously served users M),
4 (coverage vs constellation size N_S), 5 (rate vs constellation size, Mbps).
Reproduction runs evaluate the analytic engine at every tabulated coordinate;
an optional one-scalar calibration (SINR threshold gamma for coverage
figures, integer Nakagami m for the rate figure) is fitted at a designated
anchor point by golden-section search before comparing, because neither
scalar is pinned by the bundled parameter set.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Callable, Optional

from . import analytic
from .channel import MimoConfig, SatelliteFading
from .config import SystemConfig, db_to_linear, linear_to_db


FIG3_TERRESTRIAL_NT32 = (
    (1, 0.92963), (3, 0.8454), (5, 0.73698),
    (7, 0.64036), (9, 0.55979), (11, 0.48742),
    (13, 0.43074), (15, 0.38241),
)

FIG3_TERRESTRIAL_NT64 = (
    (1, 0.9808), (3, 0.95397), (5, 0.91247),
    (7, 0.85787), (9, 0.79982), (11, 0.74187),
    (13, 0.68451), (15, 0.63221),
)

FIG3_HYBRID_NT32 = (
    (1, 0.87631), (3, 0.87309), (5, 0.85954),
    (7, 0.8397), (9, 0.81723), (11, 0.7918),
    (13, 0.76891), (15, 0.7536),
)

FIG3_HYBRID_NT64 = (
    (1, 0.90937), (3, 0.90924), (5, 0.90692),
    (7, 0.90055), (9, 0.88947), (11, 0.87766),
    (13, 0.85676), (15, 0.83657),
)

FIG4_LAMBDA_1E9 = (
    (1, 0.228247468322428), (11, 0.415163744655025), (21, 0.541143471365697),
    (31, 0.626663988255993), (41, 0.685370177154322), (51, 0.726146648236645),
    (61, 0.754758011247282), (71, 0.774964977448095), (81, 0.789246767914348),
    (91, 0.799260268539864), (101, 0.806130469010449), (111, 0.810634560317834),
    (121, 0.813319347529125), (131, 0.814576803174668), (141, 0.814693218969833),
    (151, 0.813881582578688), (161, 0.812303196652315), (171, 0.810082324125224),
    (181, 0.807316258212697), (191, 0.804082351636479), (201, 0.800442997299881),
    (211, 0.796449209432084), (221, 0.792143234990933), (231, 0.787560483623789),
    (241, 0.782730972145816), (251, 0.777680418517705), (261, 0.772431079541879),
    (271, 0.767002398902955), (281, 0.761411513262682), (291, 0.755673650989248),
    (301, 0.749802448873378), (311, 0.743810205621251), (321, 0.737708086193163),
    (331, 0.731506287623146), (341, 0.725214174431266), (351, 0.71884038986736),
    (361, 0.712392947822238), (371, 0.70587930918231), (381, 0.699306445596211),
    (391, 0.692680893002242), (401, 0.686008796786181), (411, 0.679295950066125),
    (421, 0.672547826308723), (431, 0.665769607250939), (441, 0.658966206918947),
    (451, 0.652142292390238), (461, 0.645302301828617), (471, 0.638450460227841),
    (481, 0.631590793223971), (491, 0.624727139274755), (501, 0.617863160454321),
    (511, 0.611002352070118), (521, 0.604148051275417), (531, 0.597303444822715),
    (541, 0.59047157608029), (551, 0.583655351415087), (561, 0.576857546029041),
    (571, 0.570080809322673), (581, 0.563327669848657), (591, 0.556600539908608),
    (601, 0.549901719838475), (611, 0.543233402021301), (621, 0.536597674660401),
    (631, 0.529996525341319), (641, 0.523431844406798), (651, 0.516905428165596),
    (661, 0.510418981953048), (671, 0.503974123058707), (681, 0.497572383534386),
    (691, 0.491215212893884), (701, 0.484903980714382), (711, 0.478639979147899),
    (721, 0.472424425350164), (731, 0.466258463833359), (741, 0.460143168748078),
    (751, 0.454079546099404), (761, 0.448068535901218), (771, 0.442111014272302),
    (781, 0.436207795477432), (791, 0.430359633916181), (801, 0.424567226061847),
    (811, 0.418831212352579), (821, 0.413152179036599), (831, 0.407530659973111),
    (841, 0.401967138390401), (851, 0.396462048602357), (861, 0.391015777684611),
    (871, 0.385628667111334), (881, 0.380301014353612), (891, 0.37503307444026),
    (901, 0.369825061481885), (911, 0.364677150158895), (921, 0.359589477174143),
    (931, 0.354562142670858), (941, 0.349595211616401), (951, 0.344688715152511),
    (961, 0.339842651912494), (971, 0.335056989305925), (981, 0.330331664771381),
    (991, 0.32566658699767),
)

FIG4_LAMBDA_5E9 = (
    (1, 0.369439975307134), (11, 0.49186137308005), (21, 0.576614285484099),
    (31, 0.636480472707207), (41, 0.67958420112498), (51, 0.711161185749215),
    (61, 0.734637460143785), (71, 0.752292297992596), (81, 0.765669048808935),
    (91, 0.775832216777788), (101, 0.78353006640625), (111, 0.78929869681348),
    (121, 0.793529514532522), (131, 0.796513582339741), (141, 0.798471194328525),
    (151, 0.799571897354343), (161, 0.799948254489006), (171, 0.799705453479517),
    (181, 0.798928117640638), (191, 0.797685206080875), (201, 0.796033590148842),
    (211, 0.794020699591446), (221, 0.791686505799292), (231, 0.789065026276334),
    (241, 0.786185478846677), (251, 0.783073176469419), (261, 0.77975022773473),
    (271, 0.776236090210902), (281, 0.772548011233101), (291, 0.768701381780282),
    (301, 0.764710022653004), (311, 0.760586417485944), (321, 0.756341903690132),
    (331, 0.751986829867511), (341, 0.747530686328093), (351, 0.742982213894409),
    (361, 0.738349495076282), (371, 0.733640030852643), (381, 0.728860805642201),
    (391, 0.724018342534579), (401, 0.71911875045318), (411, 0.714167764605339),
    (421, 0.709170781324446), (431, 0.704132888208679), (441, 0.699058890300356),
    (451, 0.693953332920337), (461, 0.688820521667053), (471, 0.683664540004178),
    (481, 0.678489264791226), (491, 0.6732983800539), (501, 0.668095389243919),
    (511, 0.662883626198765), (521, 0.65766626497952), (531, 0.652446328737807),
    (541, 0.647226697740315), (551, 0.642010116660434), (561, 0.636799201230585),
    (571, 0.631596444335409), (581, 0.626404221614649), (591, 0.621224796634906),
    (601, 0.616060325681249), (611, 0.610912862212784), (621, 0.605784361020211),
    (631, 0.600676682118454), (641, 0.595591594402954), (651, 0.590530779094574),
    (661, 0.585495832994805), (671, 0.580488271570152), (681, 0.575509531882294),
    (691, 0.570560975378352), (701, 0.565643890554056), (711, 0.560759495500807),
    (721, 0.555908940346423), (731, 0.551093309598202), (741, 0.546313624395762),
    (751, 0.541570844680424), (761, 0.536865871287011), (771, 0.532199547963267),
    (781, 0.527572663321556), (791, 0.522985952726969), (801, 0.518440100125501),
    (811, 0.513935739815568), (821, 0.509473458165818), (831, 0.505053795281844),
    (841, 0.500677246624207), (851, 0.496344264579838), (861, 0.492055259988817),
    (871, 0.487810603628249), (881, 0.483610627654835), (891, 0.479455627007592),
    (901, 0.475345860772089), (911, 0.471281553507392), (921, 0.467262896536884),
    (931, 0.463290049203998), (941, 0.459363140093874), (951, 0.455482268221832),
    (961, 0.451647504189541), (971, 0.447858891309689), (981, 0.444116446699953),
    (991, 0.44042016234697),
)

FIG4_LAMBDA_1E8 = (
    (1, 0.38133864421165), (11, 0.453075638688636), (21, 0.506408970471744),
    (31, 0.546943015581548), (41, 0.578372403847657), (51, 0.603175387340486),
    (61, 0.62304513744293), (71, 0.639160762883946), (81, 0.652359533106729),
    (91, 0.663247671702306), (101, 0.6722725823389), (111, 0.679770602826476),
    (121, 0.685999051365014), (131, 0.691158064790661), (141, 0.695405715243028),
    (151, 0.698868639620396), (161, 0.701649630589811), (171, 0.703833140193724),
    (181, 0.705489328451707), (191, 0.706677083086357), (201, 0.70744630140944),
    (211, 0.707839635847036), (221, 0.707893844467058), (231, 0.707640847006203),
    (241, 0.707108558757309), (251, 0.706321555061432), (261, 0.705301605301881),
    (271, 0.704068105405045), (281, 0.702638430703403), (291, 0.701028225791487),
    (301, 0.699251644147098), (311, 0.697321547411958), (321, 0.695249672058737),
    (331, 0.693046769524849), (341, 0.690722724632044), (351, 0.688286656136619),
    (361, 0.685747002497413), (371, 0.683111595354952), (381, 0.680387722746929),
    (391, 0.6775821837137), (401, 0.67470133565075), (411, 0.671751135527047),
    (421, 0.668737175895948), (431, 0.665664716469454), (441, 0.662538711899541),
    (451, 0.659363836306202), (461, 0.656144505006317), (471, 0.652884893826748),
    (481, 0.649588956326493), (491, 0.646260439203926), (501, 0.642902896124484),
    (511, 0.639519700169911), (521, 0.636114055081553), (531, 0.632689005445906),
    (541, 0.629247445950136), (551, 0.625792129817913), (561, 0.622325676521035),
    (571, 0.618850578849752), (581, 0.61536920941382), (591, 0.61188382663713),
    (601, 0.608396580300665), (611, 0.604909516681812), (621, 0.601424583332001),
    (631, 0.597943633529625), (641, 0.594468430440637), (651, 0.591000651015469),
    (661, 0.587541889647464), (671, 0.584093661615151), (681, 0.580657406328094),
    (691, 0.577234490393817), (701, 0.573826210521381), (711, 0.570433796275416),
    (721, 0.567058412692932), (731, 0.563701162773948), (741, 0.560363089855692),
    (751, 0.557045179879218), (761, 0.553748363556325), (771, 0.550473518443821),
    (781, 0.547221470931512), (791, 0.543992998149697), (801, 0.540788829801271),
    (811, 0.537609649923153), (821, 0.534456098581291), (831, 0.531328773503047),
    (841, 0.528228231650499), (851, 0.525154990737801), (861, 0.522109530695538),
    (871, 0.519092295084712), (881, 0.516103692462803), (891, 0.513144097704118),
    (901, 0.510213853276523), (911, 0.507313270476405), (921, 0.504442630623659),
    (931, 0.501602186218311), (941, 0.498792162060259), (951, 0.496012756333592),
    (961, 0.493264141656745), (971, 0.490546466099738), (981, 0.48785985416966),
    (991, 0.485204407765459),
)

FIG5_LAMBDA_1E9 = (
    (0, 70.8185564244104), (50, 493.810513405853), (100, 553.312587571652),
    (150, 552.006505951443), (200, 540.330512457457), (250, 523.768906344496),
    (300, 505.47915170504), (350, 486.662286756047), (400, 472.416591073905),
    (450, 459.227449214576), (500, 446.763128539025), (550, 431.104895081174),
    (600, 418.038359525717), (650, 407.502389427909), (700, 401.826808507067),
    (750, 388.053857442355), (800, 378.277663063174), (850, 369.282913919848),
    (900, 362.65214740126), (950, 355.275294048033), (1000, 347.970351288513),
)

FIG5_LAMBDA_5E9 = (
    (0, 113.457599331404), (50, 387.478030584583), (100, 438.97979171987),
    (150, 447.679064335143), (200, 446.299319882517), (250, 440.261827817121),
    (300, 429.735976085771), (350, 420.979933403172), (400, 412.245336706883),
    (450, 397.762738247824), (500, 389.681815333828), (550, 383.898649354826),
    (600, 375.292762069968), (650, 363.202404976346), (700, 357.799655233006),
    (750, 350.235316390788), (800, 343.678795561095), (850, 339.071969563791),
    (900, 332.729101787568), (950, 324.165452524079), (1000, 319.007823266088),
)

FIG5_LAMBDA_1E8 = (
    (0, 119.17980202041), (50, 284.157175685872), (100, 331.433106652893),
    (150, 346.13027621348), (200, 346.682324978235), (250, 345.535587519965),
    (300, 343.707028759544), (350, 341.055721299038), (400, 334.953375231998),
    (450, 328.961360316665), (500, 320.645531847581), (550, 319.472693511225),
    (600, 311.561757320581), (650, 306.505369448059), (700, 301.510780353324),
    (750, 298.72845604562), (800, 292.026772872257), (850, 287.535276143291),
    (900, 284.442679738442), (950, 279.562894992918), (1000, 273.635866735204),
)


@dataclass(frozen=True)
class GoldenPoint:
    figure: int
    series: str
    x: float
    expected: float
    tolerance: float
    relative: bool  # tolerance interpreted as relative (rate) or absolute (coverage)


@dataclass(frozen=True)
class PointResult:
    point: GoldenPoint
    computed: float
    error: float  # |computed - expected|, relative if the point's tolerance is
    ok: bool


@dataclass(frozen=True)
class GoldenReport:
    figure: int
    calibration: Optional[str]
    fitted_value: Optional[float]
    anchor_ok: Optional[bool]
    points: tuple[PointResult, ...]

    @property
    def fraction_ok(self) -> float:
        return sum(p.ok for p in self.points) / len(self.points)

    @property
    def passed(self) -> bool:
        anchored = self.anchor_ok in (None, True)
        return anchored and self.fraction_ok >= 0.80

    def lines(self) -> list[str]:
        out = [f"figure {self.figure}: {len(self.points)} reference points"]
        if self.calibration:
            state = "hit" if self.anchor_ok else "MISSED"
            out.append(f"  calibrated {self.calibration} = {self.fitted_value:.6g} (anchor {state})")
        for p in self.points:
            unit = "rel" if p.point.tolerance and p.point.relative else "abs"
            out.append(
                f"  [{'ok' if p.ok else 'FAIL'}] {p.point.series} x={p.point.x:g}: "
                f"computed {p.computed:.6g} expected {p.point.expected:.6g} "
                f"({unit} err {p.error:.4f})"
            )
        out.append(
            f"figure {self.figure}: {self.fraction_ok:.1%} within tolerance -> "
            f"{'PASS' if self.passed else 'FAIL'}"
        )
        return out


# Figure series in engine units (figure 5 stored in Mbps as published).
FIG4_SERIES = {
    "lambda_T=1e-9": (1e-9, FIG4_LAMBDA_1E9),
    "lambda_T=5e-9": (5e-9, FIG4_LAMBDA_5E9),
    "lambda_T=1e-8": (1e-8, FIG4_LAMBDA_1E8),
}
FIG5_SERIES = {
    "lambda_T=1e-9": (1e-9, FIG5_LAMBDA_1E9),
    "lambda_T=5e-9": (5e-9, FIG5_LAMBDA_5E9),
    "lambda_T=1e-8": (1e-8, FIG5_LAMBDA_1E8),
}
FIG3_SERIES = {
    "N_T=32 terrestrial": (32, 0, FIG3_TERRESTRIAL_NT32),
    "N_T=64 terrestrial": (64, 0, FIG3_TERRESTRIAL_NT64),
    "N_T=32 hybrid": (32, None, FIG3_HYBRID_NT32),
    "N_T=64 hybrid": (64, None, FIG3_HYBRID_NT64),
}

FIG4_ANCHOR = ("lambda_T=1e-9", 101.0)
FIG5_ANCHOR = ("lambda_T=1e-9", 100.0)
COVERAGE_TOLERANCE = 0.03  # absolute
RATE_TOLERANCE = 0.08  # relative
NAKAGAMI_CANDIDATES = (1, 2, 3, 4, 5)


def golden_points(figure: int) -> list[GoldenPoint]:
    if figure == 3:
        return [
            GoldenPoint(3, name, m, v, COVERAGE_TOLERANCE, False)
            for name, (_, _, tab) in FIG3_SERIES.items()
            for m, v in tab
        ]
    if figure == 4:
        return [
            GoldenPoint(4, name, x, v, COVERAGE_TOLERANCE, False)
            for name, (_, tab) in FIG4_SERIES.items()
            for x, v in tab
        ]
    if figure == 5:
        return [
            GoldenPoint(5, name, x, v, RATE_TOLERANCE, True)
            for name, (_, tab) in FIG5_SERIES.items()
            for x, v in tab
        ]
    raise ValueError(f"no reference dataset for figure {figure!r}")


def _with(cfg: SystemConfig, lam: float | None = None, n_s: int | None = None,
          n_t: int | None = None, m_users: int | None = None,
          nakagami: float | None = None) -> SystemConfig:
    t, s = cfg.terrestrial, cfg.satellite
    if lam is not None:
        t = dataclasses.replace(t, bs_density=lam)
    if n_t is not None or m_users is not None:
        mimo = MimoConfig(
            antennas=n_t if n_t is not None else t.mimo.antennas,
            users_per_cell=m_users if m_users is not None else t.mimo.users_per_cell,
        )
        t = dataclasses.replace(t, mimo=mimo)
    if n_s is not None:
        s = dataclasses.replace(s, geom=dataclasses.replace(s.geom, satellite_count=int(n_s)))
    if nakagami is not None:
        s = dataclasses.replace(s, fading=SatelliteFading(nakagami_m=nakagami))
    return dataclasses.replace(cfg, terrestrial=t, satellite=s)


def golden_section_min(f: Callable[[float], float], lo: float, hi: float,
                       iterations: int = 40) -> float:
    """Deterministic golden-section minimizer on [lo, hi]."""
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iterations):
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def fit_gamma(cfg: SystemConfig, figure: int = 4) -> float:
    """Golden-section fit of the SINR threshold at the coverage anchor."""
    if figure == 4:
        series, x = FIG4_ANCHOR
        lam, tab = FIG4_SERIES[series]
        target = dict(tab)[x]
        anchored = _with(cfg, lam=lam, n_s=int(x))
    elif figure == 3:
        name = "N_T=32 terrestrial"
        n_t, n_s, tab = FIG3_SERIES[name]
        target = tab[0][1]
        anchored = _with(cfg, n_s=n_s, n_t=n_t, m_users=int(tab[0][0]))
    else:
        raise ValueError("gamma calibration applies to the coverage figures (3, 4)")

    def miss(gamma_db: float) -> float:
        got = analytic.coverage_total(anchored, db_to_linear(gamma_db)).coverage_total
        return abs(got - target)

    return db_to_linear(golden_section_min(miss, -10.0, 18.0))


def fit_nakagami(cfg: SystemConfig) -> tuple[int, float]:
    """Best integer Nakagami m at the rate anchor; returns (m, relative error)."""
    series, x = FIG5_ANCHOR
    lam, tab = FIG5_SERIES[series]
    target = dict(tab)[x]
    best_m, best_err = None, math.inf
    for m in NAKAGAMI_CANDIDATES:
        r = analytic.rate_total(_with(cfg, lam=lam, n_s=int(x), nakagami=m)).rate_total / 1e6
        err = abs(r - target) / target
        if err < best_err:
            best_m, best_err = m, err
    return best_m, best_err


def run_figure(cfg: SystemConfig, figure: int, calibrate: Optional[str] = None,
               gamma: Optional[float] = None, progress: Optional[Callable[[str], None]] = None,
    ) -> GoldenReport:
    """Evaluate the analytic engine at every tabulated coordinate of a figure.

    ``calibrate`` may name 'gamma' (figures 3, 4) or 'm' (figure 5); when
    absent, ``gamma`` (linear) or the config threshold applies, and the
    config's Nakagami m is used as-is.
    """
    say = progress or (lambda s: None)
    fitted_name = fitted_value = anchor_ok = None
    if calibrate == "gamma":
        gamma = fit_gamma(cfg, figure)
        fitted_name, fitted_value = "gamma", gamma
        say(f"fitted gamma = {linear_to_db(gamma):.3f} dB")
    elif calibrate == "m":
        if figure != 5:
            raise ValueError("m calibration applies to the rate figure (5)")
        m_fit, err = fit_nakagami(cfg)
        cfg = _with(cfg, nakagami=m_fit)
        fitted_name, fitted_value = "m", float(m_fit)
        anchor_ok = err <= RATE_TOLERANCE
        say(f"fitted m = {m_fit} (anchor relative error {err:.2%})")
    elif calibrate is not None:
        raise ValueError(f"unknown calibration scalar {calibrate!r}")
    thr = gamma if gamma is not None else cfg.analysis.sinr_threshold

    results = []
    if figure == 4:
        for name, (lam, tab) in FIG4_SERIES.items():
            for x, expected in tab:
                got = analytic.coverage_total(_with(cfg, lam=lam, n_s=int(x)), thr).coverage_total
                err = abs(got - expected)
                pt = GoldenPoint(4, name, x, expected, COVERAGE_TOLERANCE, False)
                results.append(PointResult(pt, got, err, err <= pt.tolerance))
            say(f"series {name} done")
        if calibrate == "gamma":
            anchor = next(r for r in results
                          if r.point.series == FIG4_ANCHOR[0] and r.point.x == FIG4_ANCHOR[1])
            anchor_ok = anchor.error <= COVERAGE_TOLERANCE
    elif figure == 5:
        for name, (lam, tab) in FIG5_SERIES.items():
            for x, expected in tab:
                got = analytic.rate_total(_with(cfg, lam=lam, n_s=int(x))).rate_total / 1e6
                err = abs(got - expected) / expected
                pt = GoldenPoint(5, name, x, expected, RATE_TOLERANCE, True)
                results.append(PointResult(pt, got, err, err <= pt.tolerance))
                say(f"  {name} N_S={x:g}: {got:.1f} vs {expected:.1f} Mbps")
            say(f"series {name} done")
    elif figure == 3:
        for name, (n_t, n_s, tab) in FIG3_SERIES.items():
            for m_users, expected in tab:
                point_cfg = _with(cfg, n_s=n_s, n_t=n_t, m_users=int(m_users))
                got = analytic.coverage_total(point_cfg, thr).coverage_total
                err = abs(got - expected)
                pt = GoldenPoint(3, name, m_users, expected, COVERAGE_TOLERANCE, False)
                results.append(PointResult(pt, got, err, err <= pt.tolerance))
            say(f"series {name} done")
    else:
        raise ValueError(f"no reference dataset for figure {figure!r}")

    return GoldenReport(figure, fitted_name, fitted_value, anchor_ok, tuple(results))


def compare_golden(computed: dict[tuple[str, float], float], figure: int) -> GoldenReport:
    """Compare externally computed values (keyed by (series, x)) against the
    bundled dataset; every tabulated coordinate must be present."""
    results = []
    for pt in golden_points(figure):
        key = (pt.series, pt.x)
        if key not in computed:
            raise KeyError(f"missing computed value for figure {figure} point {key}")
        got = computed[key]
        err = abs(got - pt.expected) / (pt.expected if pt.relative else 1.0)
        results.append(PointResult(pt, got, err, err <= pt.tolerance))
    return GoldenReport(figure, None, None, None, tuple(results))
