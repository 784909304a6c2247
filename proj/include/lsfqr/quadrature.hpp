#pragma once

#include "lsfqr/common.hpp"

#include <array>
#include <vector>

namespace lsfqr {

/// Symmetric Gauss rule on a triangle in barycentric form. Weights sum to 1;
/// integrals over a physical triangle are area * sum_i w_i f(p_i).
struct TriangleRule {
    int degree = 0;  // exact for polynomials up to this total degree
    std::vector<std::array<double, 3>> points;
    std::vector<double> weights;
};

namespace detail {

inline void add_center(TriangleRule& r, double w) {
    r.points.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
    r.weights.push_back(w);
}

inline void add_orbit3(TriangleRule& r, double a, double w) {
    const double c = 1.0 - 2.0 * a;
    r.points.push_back({a, a, c});
    r.points.push_back({c, a, a});
    r.points.push_back({a, c, a});
    for (int i = 0; i < 3; ++i) r.weights.push_back(w);
}

inline void add_orbit6(TriangleRule& r, double a, double b, double w) {
    const double c = 1.0 - a - b;
    r.points.push_back({a, b, c});
    r.points.push_back({a, c, b});
    r.points.push_back({b, a, c});
    r.points.push_back({b, c, a});
    r.points.push_back({c, a, b});
    r.points.push_back({c, b, a});
    for (int i = 0; i < 6; ++i) r.weights.push_back(w);
}

// Dunavant (1985) symmetric rules, degrees 1-20. Barycentric generators;
// weights normalized to sum to 1. Some high-order rules have points just
// outside the triangle or negative weights; harmless for exact polynomial
// integration.
inline TriangleRule make_dunavant(int degree) {
    TriangleRule r;
    r.degree = degree;
    switch (degree) {
        case 1:
            add_center(r, 1.0);
            break;
        case 2:
            add_orbit3(r, 1.0 / 6.0, 1.0 / 3.0);
            break;
        case 3:
            add_center(r, -0.5625);
            add_orbit3(r, 0.2, 25.0 / 48.0);
            break;
        case 4:
            add_orbit3(r, 0.44594849091596488631832925388305, 0.22338158967801146569500700843312);
            add_orbit3(r, 0.09157621350977074345957146340220, 0.10995174365532186763832632490021);
            break;
        case 5:
            add_center(r, 0.225);
            add_orbit3(r, 0.47014206410511508977044120951345, 0.13239415278850618073764938783315);
            add_orbit3(r, 0.10128650732345633880098736191512, 0.12593918054482715259568394550018);
            break;
        case 6:
            add_orbit3(r, 0.24928674517091042129163855310702, 0.11678627572637936602528961138558);
            add_orbit3(r, 0.06308901449150222834033160287082, 0.05084490637020681692093680910686);
            add_orbit6(r, 0.31035245103378440541660773395655, 0.63650249912139864723014259441205,
                       0.08285107561837357519355345642044);
            break;
        case 7:
            add_center(r, -0.14957004446767497031448264617551);
            add_orbit3(r, 0.26034596607904134570479766426679, 0.17561525743321691348266882420661);
            add_orbit3(r, 0.06513010290221623036887891059948, 0.05334723560883960230296261044945);
            add_orbit6(r, 0.31286549600487084236305913996091, 0.63844418856981280478426570854075,
                       0.07711376089026831199824523496780);
            break;
        case 8:
            add_center(r, 0.14431560767778716825109111048906);
            add_orbit3(r, 0.17056930775176020662229350149146, 0.10321737053471825028179155029212);
            add_orbit3(r, 0.05054722831703097545842355059660, 0.03245849762319808031092592834178);
            add_orbit3(r, 0.45929258829272315602881551449417, 0.09509163426728462479389610438858);
            add_orbit6(r, 0.26311282963463811342178578628464, 0.72849239295540428124100037917606,
                       0.02723031417443499426484469007390);
            break;
        case 9:
            add_center(r, 0.09713579628279609890744676309485);
            add_orbit3(r, 0.48968251919873762778370692483619, 0.03133470022713983234393199080984);
            add_orbit3(r, 0.43708959149293663726993036443535, 0.07782754100477543338465495857972);
            add_orbit3(r, 0.18820353561903273024096128046733, 0.07964773892720910288013526957424);
            add_orbit3(r, 0.04472951339445297061024247196780, 0.02557767565869810438673914467637);
            add_orbit6(r, 0.22196298916076569567510252769319, 0.74119859878449802069007987352342,
                       0.04328353937728937728937728937729);
            break;
        case 10:
            add_center(r, 0.090817990382754);
            add_orbit3(r, 0.485577633383657, 0.036725957756467);
            add_orbit3(r, 0.109481575485037, 0.045321059435528);
            add_orbit6(r, 0.141707219414880, 0.307939838764121, 0.072757916845420);
            add_orbit6(r, 0.025003534762686, 0.246672560639903, 0.028327242531057);
            add_orbit6(r, 0.009540815400299, 0.066803251012200, 0.009421666963733);
            break;
        case 11:
            add_orbit3(r, 0.534611048270758, 0.000927006328961);
            add_orbit3(r, 0.398969302965855, 0.077149534914813);
            add_orbit3(r, 0.203309900431282, 0.059322977380774);
            add_orbit3(r, 0.119350912282581, 0.036184540503418);
            add_orbit3(r, 0.032364948111276, 0.013659731002678);
            add_orbit6(r, 0.050178138310495, 0.356620648261293, 0.052337111962204);
            add_orbit6(r, 0.021022016536166, 0.171488980304042, 0.020707659639141);
            break;
        case 12:
            add_orbit3(r, 0.488217389773805, 0.025731066440455);
            add_orbit3(r, 0.439724392294460, 0.043692544538038);
            add_orbit3(r, 0.271210385012116, 0.062858224217885);
            add_orbit3(r, 0.127576145541586, 0.034796112930709);
            add_orbit3(r, 0.021317350453210, 0.006166261051559);
            add_orbit6(r, 0.115343494534698, 0.275713269685514, 0.040371557766381);
            add_orbit6(r, 0.022838332222257, 0.281325580989940, 0.022356773202303);
            add_orbit6(r, 0.025734050548330, 0.116251915907597, 0.017316231108659);
            break;
        case 13:
            add_center(r, 0.052520923400802);
            add_orbit3(r, 0.495048184939705, 0.011280145209330);
            add_orbit3(r, 0.468716635109574, 0.031423518362454);
            add_orbit3(r, 0.414521336801277, 0.047072502504194);
            add_orbit3(r, 0.229399572042831, 0.047363586536355);
            add_orbit3(r, 0.114424495196330, 0.031167529045794);
            add_orbit3(r, 0.024811391363459, 0.007975771465074);
            add_orbit6(r, 0.094853828379579, 0.268794997058761, 0.036848402728732);
            add_orbit6(r, 0.018100773278807, 0.291730066734288, 0.017401463303822);
            add_orbit6(r, 0.022233076674090, 0.126357385491669, 0.015521786839045);
            break;
        case 14:
            add_orbit3(r, 0.488963910362179, 0.021883581369429);
            add_orbit3(r, 0.417644719340454, 0.032788353544125);
            add_orbit3(r, 0.273477528308839, 0.051774104507292);
            add_orbit3(r, 0.177205532412543, 0.042162588736993);
            add_orbit3(r, 0.061799883090873, 0.014433699669777);
            add_orbit3(r, 0.019390961248701, 0.004923403602400);
            add_orbit6(r, 0.057124757403648, 0.172266687821356, 0.024665753212564);
            add_orbit6(r, 0.092916249356972, 0.336861459796345, 0.038571510787061);
            add_orbit6(r, 0.014646950055654, 0.298372882136258, 0.014436308113534);
            add_orbit6(r, 0.001268330932872, 0.118974497696957, 0.005010228838501);
            break;
        case 15:
            add_orbit3(r, 0.506972916858243, 0.001916875642849);
            add_orbit3(r, 0.431406354283023, 0.044249027271145);
            add_orbit3(r, 0.277693644847144, 0.051186548718852);
            add_orbit3(r, 0.126464891041254, 0.023687735870688);
            add_orbit3(r, 0.070808385974686, 0.013289775690021);
            add_orbit3(r, 0.018965170241073, 0.004748916608192);
            add_orbit6(r, 0.133734161966621, 0.261311371140087, 0.038550072599593);
            add_orbit6(r, 0.036366677396917, 0.388046767090269, 0.027215814320624);
            add_orbit6(r, -0.010174883126571, 0.285712220049916, 0.002182077366797);
            add_orbit6(r, 0.036843869875878, 0.215599664072284, 0.021505319847731);
            add_orbit6(r, 0.012459809331199, 0.103575616576386, 0.007673942631049);
            break;
        case 16:
            add_center(r, 0.046875697427642);
            add_orbit3(r, 0.497380541948438, 0.006405878578585);
            add_orbit3(r, 0.413469438549352, 0.041710296739387);
            add_orbit3(r, 0.470458599066991, 0.026891484250064);
            add_orbit3(r, 0.240553749969521, 0.042132522761650);
            add_orbit3(r, 0.147965794222573, 0.030000266842773);
            add_orbit3(r, 0.075465187657474, 0.014200098925024);
            add_orbit3(r, 0.016596402623025, 0.003582462351273);
            add_orbit6(r, 0.103575692245252, 0.296555596579887, 0.032773147460627);
            add_orbit6(r, 0.020083411655416, 0.337723063403079, 0.015298306248441);
            add_orbit6(r, -0.004341002614139, 0.204748281642812, 0.002386244192839);
            add_orbit6(r, 0.041941786468010, 0.189358492130623, 0.019084792755899);
            add_orbit6(r, 0.014317320230681, 0.085283615682657, 0.006850054546542);
            break;
        case 17:
            add_center(r, 0.033437199290803);
            add_orbit3(r, 0.497170540556774, 0.005093415440507);
            add_orbit3(r, 0.482176322624625, 0.014670864527638);
            add_orbit3(r, 0.450239969020782, 0.024350878353672);
            add_orbit3(r, 0.400266239377397, 0.031107550868969);
            add_orbit3(r, 0.252141267970953, 0.031257111218620);
            add_orbit3(r, 0.162047004658461, 0.024815654339665);
            add_orbit3(r, 0.075875882260746, 0.014056073070557);
            add_orbit3(r, 0.015654726967822, 0.003194676173779);
            add_orbit6(r, 0.010186928826919, 0.334319867363658, 0.008119655318993);
            add_orbit6(r, 0.135440871671036, 0.292221537796944, 0.026805742283163);
            add_orbit6(r, 0.054423924290583, 0.319574885423190, 0.018459993210822);
            add_orbit6(r, 0.012868560833637, 0.190704224192292, 0.008476868534328);
            add_orbit6(r, 0.067165782413524, 0.180483211648746, 0.018292796770025);
            add_orbit6(r, 0.014663182224828, 0.080711313679564, 0.006665632004165);
            break;
        case 18:
            add_center(r, 0.030809939937647);
            add_orbit3(r, 0.493344808630921, 0.009072436679404);
            add_orbit3(r, 0.469210594241957, 0.018761316939594);
            add_orbit3(r, 0.436281395887006, 0.019441097985477);
            add_orbit3(r, 0.394846170673416, 0.027753948610810);
            add_orbit3(r, 0.249794568803157, 0.032256225351457);
            add_orbit3(r, 0.161432193743843, 0.025074032616922);
            add_orbit3(r, 0.076598227485371, 0.015271927971832);
            add_orbit3(r, 0.024252439353450, 0.006793922022963);
            add_orbit3(r, 0.043146367216965, -0.002223098729920);
            add_orbit6(r, 0.008430536202420, 0.358911494940944, 0.006331914076406);
            add_orbit6(r, 0.131186551737188, 0.294402476751957, 0.027257538049138);
            add_orbit6(r, 0.050203151565675, 0.325017801641814, 0.017676785649465);
            add_orbit6(r, 0.066329263810916, 0.184737559666046, 0.018379484638070);
            add_orbit6(r, 0.011996194566236, 0.218796800013321, 0.008104732808192);
            add_orbit6(r, 0.014858100590125, 0.101179597136408, 0.007634129070725);
            add_orbit6(r, -0.035222015287949, 0.020874755282586, 0.000046187660794);
            break;
        case 19:
            add_center(r, 0.032906331388919);
            add_orbit3(r, 0.489609987073006, 0.010330731891272);
            add_orbit3(r, 0.454536892697893, 0.022387247263016);
            add_orbit3(r, 0.401416680649431, 0.030266125869468);
            add_orbit3(r, 0.255551654403098, 0.030490967802198);
            add_orbit3(r, 0.177077942152130, 0.024159212741641);
            add_orbit3(r, 0.110061053227952, 0.016050803586801);
            add_orbit3(r, 0.055528624251840, 0.008084580261784);
            add_orbit3(r, 0.012621863777229, 0.002079362027485);
            add_orbit6(r, 0.003611417848412, 0.395754787356943, 0.003884876904981);
            add_orbit6(r, 0.134466754530780, 0.307929983880436, 0.025574160612022);
            add_orbit6(r, 0.014446025776115, 0.264566948406520, 0.008880903573338);
            add_orbit6(r, 0.046933578838178, 0.358539352205951, 0.016124546761731);
            add_orbit6(r, 0.002861120350567, 0.157807405968595, 0.002491941817491);
            add_orbit6(r, 0.223861424097916, 0.075050596975911, 0.018242840118951);
            add_orbit6(r, 0.034647074816760, 0.142421601113383, 0.010258563736199);
            add_orbit6(r, 0.010161119296278, 0.065494628082938, 0.003799928855302);
            break;
        case 20:
            add_center(r, 0.033057055541624);
            add_orbit3(r, 0.500950464352200, 0.000867019185663);
            add_orbit3(r, 0.488212957934729, 0.011660052716448);
            add_orbit3(r, 0.455136681950283, 0.022876936356421);
            add_orbit3(r, 0.401996259318289, 0.030448982673938);
            add_orbit3(r, 0.255892909759421, 0.030624891725355);
            add_orbit3(r, 0.176488255995106, 0.024368057676800);
            add_orbit3(r, 0.104170855336758, 0.015997432032024);
            add_orbit3(r, 0.053068963840930, 0.007698301815602);
            add_orbit3(r, 0.041618715196029, -0.000632060497488);
            add_orbit3(r, 0.011581921406822, 0.001751134301193);
            add_orbit6(r, 0.048741583664839, 0.344855770229001, 0.016465839189576);
            add_orbit6(r, 0.006314115948605, 0.377843269594854, 0.004839033540485);
            add_orbit6(r, 0.134316520547348, 0.306635479062357, 0.025804906534650);
            add_orbit6(r, 0.013973893962392, 0.249419362774742, 0.008471091054441);
            add_orbit6(r, 0.075549132909764, 0.212775724802802, 0.018354914106280);
            add_orbit6(r, -0.008368153208227, 0.146965436053239, 0.000704404677908);
            add_orbit6(r, 0.026686063258714, 0.137726978828923, 0.010112684927462);
            add_orbit6(r, 0.010547719294141, 0.059696109149007, 0.003573909385950);
            break;
        default:
            LSFQR_THROW(InvalidArgument, "no symmetric triangle rule of degree " +
                                             std::to_string(degree) + " (supported: 1..20)");
    }
    return r;
}

}  // namespace detail

/// Smallest tabulated rule exact for polynomials of total degree `degree`.
inline TriangleRule triangle_rule(int degree) {
    LSFQR_REQUIRE(InvalidArgument, degree >= 0 && degree <= 20,
                  "quadrature exactness degree must be in 0..20");
    return detail::make_dunavant(degree < 1 ? 1 : degree);
}

}  // namespace lsfqr
