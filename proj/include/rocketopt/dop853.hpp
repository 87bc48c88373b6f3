#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <string>

#include <Eigen/Core>

#include "rocketopt/errors.hpp"

namespace rocketopt {

struct IntegratorConfig {
  double rel_tol = 1e-12;
  double abs_tol = 1e-12;
  long max_steps = 1000000;
  double event_tol = 1e-9;
  double h_min = 1e-13;
  double h_max = 0.0;  ///< 0 means the whole span

  void validate() const;
};

/// One accepted step with its 7th-order continuous extension.
template <int N>
struct DenseSegment {
  using Vec = Eigen::Matrix<double, N, 1>;
  double t0 = 0.0;
  double h = 0.0;
  std::array<Vec, 8> rc;

  double t1() const { return t0 + h; }

  Vec eval(double t) const {
    const double s = (t - t0) / h;
    const double s1 = 1.0 - s;
    return rc[0] +
           s * (rc[1] +
                s1 * (rc[2] +
                      s * (rc[3] +
                           s1 * (rc[4] +
                                 s * (rc[5] + s1 * (rc[6] + s * rc[7]))))));
  }
};

struct IntegrationStats {
  long steps = 0;
  long accepted = 0;
  long rejected = 0;
  long evaluations = 0;
};

/// Dormand-Prince 8(5,3) with the usual step-size controller and dense
/// output. Step-size collapse and step-count exhaustion are reported as
/// ChatteringError carrying the time where integration stalled.
template <int N>
class Dop853 {
 public:
  using Vec = Eigen::Matrix<double, N, 1>;
  using Rhs = std::function<Vec(double, const Vec&)>;
  /// Called after every accepted step; returning false stops integration.
  using StepObserver = std::function<bool(const DenseSegment<N>&)>;

  explicit Dop853(IntegratorConfig cfg) : cfg_(cfg) { cfg_.validate(); }

  const IntegrationStats& stats() const { return stats_; }

  /// Integrates y' = f(t, y) from t0 to t1 (t1 > t0). Returns y at the last
  /// accepted time, which is t1 unless the observer stopped early.
  Vec integrate(const Rhs& f, double t0, const Vec& y0, double t1,
                const StepObserver& observer = {}) {
    stats_ = {};
    if (!(t1 >= t0)) {
      throw Error(ErrorKind::kInvalidInput, "Dop853: t1 < t0");
    }
    if (t1 == t0) return y0;
    const double span = t1 - t0;
    const double hmax = cfg_.h_max > 0.0 ? std::min(cfg_.h_max, span) : span;

    double t = t0;
    Vec y = y0;
    Vec k1 = eval(f, t, y);
    double h = initial_step(f, t, y, k1, hmax);
    bool reject = false;
    bool last = false;
    const double expo1 = 1.0 / 8.0;
    const double fac1 = 1.0 / 3.0, fac2 = 6.0, safe = 0.9;

    while (true) {
      if (stats_.steps >= cfg_.max_steps) {
        throw ChatteringError(t, "Dop853: step budget exhausted at t = " +
                                     std::to_string(t));
      }
      if (h < cfg_.h_min || 0.1 * h <= std::abs(t) * 2.3e-16) {
        throw ChatteringError(t, "Dop853: step size underflow at t = " +
                                     std::to_string(t));
      }
      if (t + 1.01 * h - t1 > 0.0) {
        h = t1 - t;
        last = true;
      }
      ++stats_.steps;
      Stages st = step(f, t, y, k1, h);
      const double err = h * error_norm(y, k1, st);
      if (!std::isfinite(err)) {
        throw Error(ErrorKind::kIntegrationFailure,
                    "Dop853: non-finite state at t = " + std::to_string(t));
      }
      const double fac11 = std::pow(err, expo1);
      const double fac = std::clamp(fac11 / safe, 1.0 / fac2, 1.0 / fac1);
      double hnew = h / fac;

      if (err <= 1.0) {
        ++stats_.accepted;
        const Vec knew = eval(f, t + h, st.y1);
        DenseSegment<N> seg = dense(f, t, y, k1, knew, h, st);
        k1 = knew;
        y = st.y1;
        t = last ? t1 : t + h;
        if (observer && !observer(seg)) return y;
        if (last) return y;
        if (hnew > hmax) hnew = hmax;
        if (reject) hnew = std::min(hnew, h);
        reject = false;
      } else {
        hnew = h / std::min(1.0 / fac1, fac11 / safe);
        reject = true;
        if (stats_.accepted >= 1) ++stats_.rejected;
        last = false;
      }
      h = hnew;
    }
  }

 private:
  struct Stages {
    Vec k2, k3, k4, k6, k7, k8, k9, k10, y1;
  };

  Vec eval(const Rhs& f, double t, const Vec& y) {
    ++stats_.evaluations;
    return f(t, y);
  }

  double initial_step(const Rhs& f, double t, const Vec& y, const Vec& k1,
                      double hmax) {
    const Vec sk = (cfg_.abs_tol + cfg_.rel_tol * y.array().abs()).matrix();
    const double dnf = (k1.array() / sk.array()).square().sum();
    const double dny = (y.array() / sk.array()).square().sum();
    double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6
                                              : std::sqrt(dny / dnf) * 0.01;
    h = std::min(h, hmax);
    const Vec k2 = eval(f, t + h, y + h * k1);
    const double der2 =
        std::sqrt(((k2 - k1).array() / sk.array()).square().sum()) / h;
    const double der12 = std::max(std::abs(der2), std::sqrt(dnf));
    const double h1 = der12 <= 1e-15 ? std::max(1e-6, h * 1e-3)
                                     : std::pow(0.01 / der12, 0.125);
    return std::min({100.0 * h, h1, hmax});
  }

  Stages step(const Rhs& f, double t, const Vec& y, const Vec& k1, double h) {
    constexpr double c2 = 0.526001519587677318785587544488E-01,
                     c3 = 0.789002279381515978178381316732E-01,
                     c4 = 0.118350341907227396726757197510E+00,
                     c5 = 0.281649658092772603273242802490E+00,
                     c6 = 0.333333333333333333333333333333E+00, c7 = 0.25E+00,
                     c8 = 0.307692307692307692307692307692E+00,
                     c9 = 0.651282051282051282051282051282E+00, c10 = 0.6E+00,
                     c11 = 0.857142857142857142857142857142E+00;
    constexpr double b1 = 5.42937341165687622380535766363E-2,
                     b6 = 4.45031289275240888144113950566E0,
                     b7 = 1.89151789931450038304281599044E0,
                     b8 = -5.8012039600105847814672114227E0,
                     b9 = 3.1116436695781989440891606237E-1,
                     b10 = -1.52160949662516078556178806805E-1,
                     b11 = 2.01365400804030348374776537501E-1,
                     b12 = 4.47106157277725905176885569043E-2;
    constexpr double a21 = 5.26001519587677318785587544488E-2,
                     a31 = 1.97250569845378994544595329183E-2,
                     a32 = 5.91751709536136983633785987549E-2,
                     a41 = 2.95875854768068491816892993775E-2,
                     a43 = 8.87627564304205475450678981324E-2,
                     a51 = 2.41365134159266685502369798665E-1,
                     a53 = -8.84549479328286085344864962717E-1,
                     a54 = 9.24834003261792003115737966543E-1,
                     a61 = 3.7037037037037037037037037037E-2,
                     a64 = 1.70828608729473871279604482173E-1,
                     a65 = 1.25467687566822425016691814123E-1,
                     a71 = 3.7109375E-2,
                     a74 = 1.70252211019544039314978060272E-1,
                     a75 = 6.02165389804559606850219397283E-2,
                     a76 = -1.7578125E-2,
                     a81 = 3.70920001185047927108779319836E-2,
                     a84 = 1.70383925712239993810214054705E-1,
                     a85 = 1.07262030446373284651809199168E-1,
                     a86 = -1.53194377486244017527936158236E-2,
                     a87 = 8.27378916381402288758473766002E-3,
                     a91 = 6.24110958716075717114429577812E-1,
                     a94 = -3.36089262944694129406857109825E0,
                     a95 = -8.68219346841726006818189891453E-1,
                     a96 = 2.75920996994467083049415600797E1,
                     a97 = 2.01540675504778934086186788979E1,
                     a98 = -4.34898841810699588477366255144E1,
                     a101 = 4.77662536438264365890433908527E-1,
                     a104 = -2.48811461997166764192642586468E0,
                     a105 = -5.90290826836842996371446475743E-1,
                     a106 = 2.12300514481811942347288949897E1,
                     a107 = 1.52792336328824235832596922938E1,
                     a108 = -3.32882109689848629194453265587E1,
                     a109 = -2.03312017085086261358222928593E-2,
                     a111 = -9.3714243008598732571704021658E-1,
                     a114 = 5.18637242884406370830023853209E0,
                     a115 = 1.09143734899672957818500254654E0,
                     a116 = -8.14978701074692612513997267357E0,
                     a117 = -1.85200656599969598641566180701E1,
                     a118 = 2.27394870993505042818970056734E1,
                     a119 = 2.49360555267965238987089396762E0,
                     a1110 = -3.0467644718982195003823669022E0,
                     a121 = 2.27331014751653820792359768449E0,
                     a124 = -1.05344954667372501984066689879E1,
                     a125 = -2.00087205822486249909675718444E0,
                     a126 = -1.79589318631187989172765950534E1,
                     a127 = 2.79488845294199600508499808837E1,
                     a128 = -2.85899827713502369474065508674E0,
                     a129 = -8.87285693353062954433549289258E0,
                     a1210 = 1.23605671757943030647266201528E1,
                     a1211 = 6.43392746015763530355970484046E-1;
    Stages s;
    s.k2 = eval(f, t + c2 * h, y + h * a21 * k1);
    s.k3 = eval(f, t + c3 * h, y + h * (a31 * k1 + a32 * s.k2));
    s.k4 = eval(f, t + c4 * h, y + h * (a41 * k1 + a43 * s.k3));
    const Vec k5 =
        eval(f, t + c5 * h, y + h * (a51 * k1 + a53 * s.k3 + a54 * s.k4));
    s.k6 = eval(f, t + c6 * h, y + h * (a61 * k1 + a64 * s.k4 + a65 * k5));
    s.k7 = eval(f, t + c7 * h,
                y + h * (a71 * k1 + a74 * s.k4 + a75 * k5 + a76 * s.k6));
    s.k8 = eval(f, t + c8 * h,
                y + h * (a81 * k1 + a84 * s.k4 + a85 * k5 + a86 * s.k6 +
                         a87 * s.k7));
    s.k9 = eval(f, t + c9 * h,
                y + h * (a91 * k1 + a94 * s.k4 + a95 * k5 + a96 * s.k6 +
                         a97 * s.k7 + a98 * s.k8));
    s.k10 = eval(f, t + c10 * h,
                 y + h * (a101 * k1 + a104 * s.k4 + a105 * k5 + a106 * s.k6 +
                          a107 * s.k7 + a108 * s.k8 + a109 * s.k9));
    // k11 and k12 reuse the k2/k3 slots as in the reference code.
    const Vec k11 =
        eval(f, t + c11 * h,
             y + h * (a111 * k1 + a114 * s.k4 + a115 * k5 + a116 * s.k6 +
                      a117 * s.k7 + a118 * s.k8 + a119 * s.k9 +
                      a1110 * s.k10));
    const Vec k12 =
        eval(f, t + h,
             y + h * (a121 * k1 + a124 * s.k4 + a125 * k5 + a126 * s.k6 +
                      a127 * s.k7 + a128 * s.k8 + a129 * s.k9 +
                      a1210 * s.k10 + a1211 * k11));
    s.k2 = k11;
    s.k3 = k12;
    s.k4 = b1 * k1 + b6 * s.k6 + b7 * s.k7 + b8 * s.k8 + b9 * s.k9 +
           b10 * s.k10 + b11 * s.k2 + b12 * s.k3;
    s.y1 = y + h * s.k4;
    return s;
  }

  double error_norm(const Vec& y, const Vec& k1, const Stages& s) const {
    constexpr double bhh1 = 0.244094488188976377952755905512E+00,
                     bhh2 = 0.733846688281611857341361741547E+00,
                     bhh3 = 0.220588235294117647058823529412E-01,
                     er1 = 0.1312004499419488073250102996E-01,
                     er6 = -0.1225156446376204440720569753E+01,
                     er7 = -0.4957589496572501915214079952E+00,
                     er8 = 0.1664377182454986536961530415E+01,
                     er9 = -0.3503288487499736816886487290E+00,
                     er10 = 0.3341791187130174790297318841E+00,
                     er11 = 0.8192320648511571246570742613E-01,
                     er12 = -0.2235530786388629525884427845E-01;
    double err = 0.0, err2 = 0.0;
    const Eigen::Index n = y.size();
    for (Eigen::Index i = 0; i < n; ++i) {
      const double sk =
          1.0 / (cfg_.abs_tol +
                 cfg_.rel_tol * std::max(std::abs(y[i]), std::abs(s.y1[i])));
      double q = (s.k4[i] - bhh1 * k1[i] - bhh2 * s.k9[i] - bhh3 * s.k3[i]) *
                 sk;
      err2 += q * q;
      q = (er1 * k1[i] + er6 * s.k6[i] + er7 * s.k7[i] + er8 * s.k8[i] +
           er9 * s.k9[i] + er10 * s.k10[i] + er11 * s.k2[i] + er12 * s.k3[i]) *
          sk;
      err += q * q;
    }
    const double deno = err + 0.01 * err2;
    return err * std::sqrt(1.0 / (deno <= 0.0 ? double(n) : deno * double(n)));
  }

  DenseSegment<N> dense(const Rhs& f, double t, const Vec& y, const Vec& k1,
                        const Vec& knew, double h, const Stages& s) {
    constexpr double c14 = 0.1E+00, c15 = 0.2E+00,
                     c16 = 0.777777777777777777777777777778E+00;
    constexpr double a141 = 5.61675022830479523392909219681E-2,
                     a147 = 2.53500210216624811088794765333E-1,
                     a148 = -2.46239037470802489917441475441E-1,
                     a149 = -1.24191423263816360469010140626E-1,
                     a1410 = 1.5329179827876569731206322685E-1,
                     a1411 = 8.20105229563468988491666602057E-3,
                     a1412 = 7.56789766054569976138603589584E-3,
                     a1413 = -8.298E-3;
    constexpr double a151 = 3.18346481635021405060768473261E-2,
                     a156 = 2.83009096723667755288322961402E-2,
                     a157 = 5.35419883074385676223797384372E-2,
                     a158 = -5.49237485713909884646569340306E-2,
                     a1511 = -1.08347328697249322858509316994E-4,
                     a1512 = 3.82571090835658412954920192323E-4,
                     a1513 = -3.40465008687404560802977114492E-4,
                     a1514 = 1.41312443674632500278074618366E-1;
    constexpr double a161 = -4.28896301583791923408573538692E-1,
                     a166 = -4.69762141536116384314449447206E0,
                     a167 = 7.68342119606259904184240953878E0,
                     a168 = 4.06898981839711007970213554331E0,
                     a169 = 3.56727187455281109270669543021E-1,
                     a1613 = -1.39902416515901462129418009734E-3,
                     a1614 = 2.9475147891527723389556272149E0,
                     a1615 = -9.15095847217987001081870187138E0;
    constexpr double d41 = -0.84289382761090128651353491142E+01,
                     d46 = 0.56671495351937776962531783590E+00,
                     d47 = -0.30689499459498916912797304727E+01,
                     d48 = 0.23846676565120698287728149680E+01,
                     d49 = 0.21170345824450282767155149946E+01,
                     d410 = -0.87139158377797299206789907490E+00,
                     d411 = 0.22404374302607882758541771650E+01,
                     d412 = 0.63157877876946881815570249290E+00,
                     d413 = -0.88990336451333310820698117400E-01,
                     d414 = 0.18148505520854727256656404962E+02,
                     d415 = -0.91946323924783554000451984436E+01,
                     d416 = -0.44360363875948939664310572000E+01;
    constexpr double d51 = 0.10427508642579134603413151009E+02,
                     d56 = 0.24228349177525818288430175319E+03,
                     d57 = 0.16520045171727028198505394887E+03,
                     d58 = -0.37454675472269020279518312152E+03,
                     d59 = -0.22113666853125306036270938578E+02,
                     d510 = 0.77334326684722638389603898808E+01,
                     d511 = -0.30674084731089398182061213626E+02,
                     d512 = -0.93321305264302278729567221706E+01,
                     d513 = 0.15697238121770843886131091075E+02,
                     d514 = -0.31139403219565177677282850411E+02,
                     d515 = -0.93529243588444783865713862664E+01,
                     d516 = 0.35816841486394083752465898540E+02;
    constexpr double d61 = 0.19985053242002433820987653617E+02,
                     d66 = -0.38703730874935176555105901742E+03,
                     d67 = -0.18917813819516756882830838328E+03,
                     d68 = 0.52780815920542364900561016686E+03,
                     d69 = -0.11573902539959630126141871134E+02,
                     d610 = 0.68812326946963000169666922661E+01,
                     d611 = -0.10006050966910838403183860980E+01,
                     d612 = 0.77771377980534432092869265740E+00,
                     d613 = -0.27782057523535084065932004339E+01,
                     d614 = -0.60196695231264120758267380846E+02,
                     d615 = 0.84320405506677161018159903784E+02,
                     d616 = 0.11992291136182789328035130030E+02;
    constexpr double d71 = -0.25693933462703749003312586129E+02,
                     d76 = -0.15418974869023643374053993627E+03,
                     d77 = -0.23152937917604549567536039109E+03,
                     d78 = 0.35763911791061412378285349910E+03,
                     d79 = 0.93405324183624310003907691704E+02,
                     d710 = -0.37458323136451633156875139351E+02,
                     d711 = 0.10409964950896230045147246184E+03,
                     d712 = 0.29840293426660503123344363579E+02,
                     d713 = -0.43533456590011143754432175058E+02,
                     d714 = 0.96324553959188282948394950600E+02,
                     d715 = -0.39177261675615439165231486172E+02,
                     d716 = -0.14972683625798562581422125276E+03;

    DenseSegment<N> seg;
    seg.t0 = t;
    seg.h = h;
    auto& rc = seg.rc;
    const Vec ydiff = s.y1 - y;
    const Vec bspl = h * k1 - ydiff;
    rc[0] = y;
    rc[1] = ydiff;
    rc[2] = bspl;
    rc[3] = ydiff - h * knew - bspl;
    rc[4] = d41 * k1 + d46 * s.k6 + d47 * s.k7 + d48 * s.k8 + d49 * s.k9 +
            d410 * s.k10 + d411 * s.k2 + d412 * s.k3;
    rc[5] = d51 * k1 + d56 * s.k6 + d57 * s.k7 + d58 * s.k8 + d59 * s.k9 +
            d510 * s.k10 + d511 * s.k2 + d512 * s.k3;
    rc[6] = d61 * k1 + d66 * s.k6 + d67 * s.k7 + d68 * s.k8 + d69 * s.k9 +
            d610 * s.k10 + d611 * s.k2 + d612 * s.k3;
    rc[7] = d71 * k1 + d76 * s.k6 + d77 * s.k7 + d78 * s.k8 + d79 * s.k9 +
            d710 * s.k10 + d711 * s.k2 + d712 * s.k3;

    const Vec k14 =
        eval(f, t + c14 * h,
             y + h * (a141 * k1 + a147 * s.k7 + a148 * s.k8 + a149 * s.k9 +
                      a1410 * s.k10 + a1411 * s.k2 + a1412 * s.k3 +
                      a1413 * knew));
    const Vec k15 =
        eval(f, t + c15 * h,
             y + h * (a151 * k1 + a156 * s.k6 + a157 * s.k7 + a158 * s.k8 +
                      a1511 * s.k2 + a1512 * s.k3 + a1513 * knew +
                      a1514 * k14));
    const Vec k16 =
        eval(f, t + c16 * h,
             y + h * (a161 * k1 + a166 * s.k6 + a167 * s.k7 + a168 * s.k8 +
                      a169 * s.k9 + a1613 * knew + a1614 * k14 +
                      a1615 * k15));
    rc[4] = h * (rc[4] + d413 * knew + d414 * k14 + d415 * k15 + d416 * k16);
    rc[5] = h * (rc[5] + d513 * knew + d514 * k14 + d515 * k15 + d516 * k16);
    rc[6] = h * (rc[6] + d613 * knew + d614 * k14 + d615 * k15 + d616 * k16);
    rc[7] = h * (rc[7] + d713 * knew + d714 * k14 + d715 * k15 + d716 * k16);
    return seg;
  }

  IntegratorConfig cfg_;
  IntegrationStats stats_;
};

}  // namespace rocketopt
