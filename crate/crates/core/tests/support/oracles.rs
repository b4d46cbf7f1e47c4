//! Extended-precision reference values, generated with mpmath at 60 digits.
#![allow(clippy::excessive_precision)]

/// `(α, q, σ, ρ)` for the sampled Gaussian mechanism by direct summation.
pub const SGM_RDP: [(u32, f64, f64, f64); 175] = [
    (2, 0.001, 0.5, 5.3596713703623594457e-5),
    (2, 0.001, 1.0, 1.7182803522145153698e-6),
    (2, 0.001, 2.0, 2.8402537635253047106e-7),
    (2, 0.001, 10.0, 1.0050167033665129089e-8),
    (2, 0.001, 100.0, 1.0000500016167033755e-10),
    (2, 0.01, 0.5, 0.005345502314345255509),
    (2, 0.01, 1.0, 0.00017181342207454793814),
    (2, 0.01, 2.0, 2.8402138324224848533e-5),
    (2, 0.01, 10.0, 1.0050162033878520726e-6),
    (2, 0.01, 100.0, 1.00004999666620838e-8),
    (2, 0.1, 0.5, 0.4291695905978997226),
    (2, 0.1, 1.0, 0.017036863236176551662),
    (2, 0.1, 2.0, 0.0028362282662636226261),
    (2, 0.1, 10.0, 0.00010049662088710934962),
    (2, 0.1, 100.0, 1.0000495016170389115e-6),
    (2, 0.5, 0.5, 2.6671960885860428894),
    (2, 0.5, 1.0, 0.35737401950878853731),
    (2, 0.5, 2.0, 0.068598724381658406416),
    (2, 0.5, 10.0, 0.0025093906151366134048),
    (2, 0.5, 100.0, 2.5000937515624902334e-5),
    (2, 1.0, 0.5, 4.0),
    (2, 1.0, 1.0, 1.0),
    (2, 1.0, 2.0, 0.25),
    (2, 1.0, 10.0, 0.01),
    (2, 1.0, 100.0, 0.0001),
    (3, 0.001, 0.5, 0.00016166758430918458232),
    (3, 0.001, 1.0, 2.5843814093686966855e-6),
    (3, 0.001, 2.0, 4.2617040529362101977e-7),
    (3, 0.001, 10.0, 1.5075402415334833014e-8),
    (3, 0.001, 100.0, 1.5000751522950416425e-10),
    (3, 0.01, 0.5, 0.082194377982107462031),
    (3, 0.01, 1.0, 0.00026463757458466135937),
    (3, 0.01, 2.0, 4.2734448101351602866e-5),
    (3, 0.01, 10.0, 1.5076748058901100045e-6),
    (3, 0.01, 100.0, 1.5000764801977841252e-8),
    (3, 0.1, 0.5, 2.5535812800204852987),
    (3, 0.1, 1.0, 0.031712300303376428824),
    (3, 0.1, 2.0, 0.0043736583485770584904),
    (3, 0.1, 10.0, 0.00015088175501894418079),
    (3, 0.1, 100.0, 1.5000877542347043763e-6),
    (3, 0.5, 0.5, 4.9607944459870645141),
    (3, 0.5, 1.0, 0.69688911859804407817),
    (3, 0.5, 2.0, 0.11002319335762329151),
    (3, 0.5, 10.0, 0.0037735392120458569738),
    (3, 0.5, 100.0, 3.7502343851564013491e-5),
    (3, 1.0, 0.5, 6.0),
    (3, 1.0, 1.0, 1.5),
    (3, 1.0, 2.0, 0.375),
    (3, 1.0, 10.0, 0.015),
    (3, 1.0, 100.0, 0.00015),
    (4, 0.001, 0.5, 0.0090300526530094200325),
    (4, 0.001, 1.0, 3.4552321362752119843e-6),
    (4, 0.001, 2.0, 5.6840381972008805901e-7),
    (4, 0.001, 10.0, 2.0100739045682300809e-8),
    (4, 0.001, 100.0, 2.0001004028867575221e-10),
    (4, 0.01, 0.5, 1.8618755130319663985),
    (4, 0.01, 1.0, 0.00036315404891075673411),
    (4, 0.01, 2.0, 5.7155807371734086294e-5),
    (4, 0.01, 10.0, 2.0104337957008236857e-6),
    (4, 0.01, 100.0, 2.0001039538668895185e-8),
    (4, 0.1, 0.5, 4.929960718132622794),
    (4, 0.1, 1.0, 0.058672606960080511514),
    (4, 0.1, 2.0, 0.0060032829644896487843),
    (4, 0.1, 10.0, 0.0002013585355880893104),
    (4, 0.1, 100.0, 2.0001350084785721086e-6),
    (4, 0.5, 0.5, 7.0758119556209986905),
    (4, 0.5, 1.0, 1.1507097873087257322),
    (4, 0.5, 2.0, 0.15736820319402478435),
    (4, 0.5, 10.0, 0.0050440531626625461765),
    (4, 0.5, 100.0, 5.0004375302094204954e-5),
    (4, 1.0, 0.5, 8.0),
    (4, 1.0, 1.0, 2.0),
    (4, 1.0, 2.0, 0.5),
    (4, 1.0, 10.0, 0.02),
    (4, 1.0, 100.0, 0.0002),
    (8, 0.001, 0.5, 8.1054225390955561471),
    (8, 0.001, 1.0, 6.9879416490941471102e-6),
    (8, 0.001, 2.0, 1.1382237177147441081e-6),
    (8, 0.001, 10.0, 4.0203098135655224057e-8),
    (8, 0.001, 100.0, 4.0002024043881955626e-10),
    (8, 0.01, 0.5, 10.736948358948984245),
    (8, 0.01, 1.0, 0.00089364390760603189425),
    (8, 0.01, 2.0, 0.00011575614792991031737),
    (8, 0.01, 10.0, 4.0224744305738332196e-6),
    (8, 0.01, 100.0, 4.0002237499968377027e-8),
    (8, 0.1, 0.5, 13.368474179442488379),
    (8, 0.1, 1.0, 1.3783614113481265741),
    (8, 0.1, 2.0, 0.013725430103219919584),
    (8, 0.1, 10.0, 0.00040418865272258818711),
    (8, 0.1, 100.0, 4.0004140480183174548e-6),
    (8, 0.5, 0.5, 15.207831793646567006),
    (8, 0.5, 1.0, 3.2088792609697944134),
    (8, 0.5, 2.0, 0.42374833315045390863),
    (8, 0.5, 10.0, 0.010190725596076117686),
    (8, 0.5, 100.0, 0.00010001875318788163572),
    (8, 1.0, 0.5, 16.0),
    (8, 1.0, 1.0, 4.0),
    (8, 1.0, 2.0, 1.0),
    (8, 1.0, 10.0, 0.04),
    (8, 1.0, 100.0, 0.0004),
    (16, 0.001, 0.5, 24.631727702419053833),
    (16, 0.001, 1.0, 0.63206000792593391266),
    (16, 0.001, 2.0, 2.282142474371968113e-6),
    (16, 0.001, 10.0, 8.0412677495764426126e-8),
    (16, 0.001, 100.0, 8.0004112032453326938e-10),
    (16, 0.01, 0.5, 27.08781846827936923),
    (16, 0.01, 1.0, 3.0878507836962446159),
    (16, 0.01, 2.0, 0.0002376240196404601958),
    (16, 0.01, 10.0, 8.0513865081072340066e-6),
    (16, 0.01, 100.0, 8.0005108700472727227e-8),
    (16, 0.1, 0.5, 29.543909234139684663),
    (16, 0.1, 1.0, 5.5439121709021214132),
    (16, 0.1, 2.0, 0.045291839083621966812),
    (16, 0.1, 10.0, 0.00081434849941735948925),
    (16, 0.1, 100.0, 8.0014043009620826391e-6),
    (16, 0.5, 0.5, 31.260643007402725003),
    (16, 0.5, 1.0, 7.260643333699769968),
    (16, 0.5, 2.0, 1.2867733394609892981),
    (16, 0.5, 10.0, 0.020804535571317702936),
    (16, 0.5, 100.0, 0.00020007752871656178698),
    (16, 1.0, 0.5, 32.0),
    (16, 1.0, 1.0, 8.0),
    (16, 1.0, 2.0, 2.0),
    (16, 1.0, 10.0, 0.08),
    (16, 1.0, 100.0, 0.0008),
    (32, 0.001, 0.5, 56.86941390556682629),
    (32, 0.001, 1.0, 8.8694139056023260027),
    (32, 0.001, 2.0, 4.5873148985516597903e-6),
    (32, 0.001, 10.0, 1.6085128827138858905e-7),
    (32, 0.001, 100.0, 1.6000847984448187982e-9),
    (32, 0.01, 0.5, 59.246275937044550867),
    (32, 0.01, 1.0, 11.246275937048068857),
    (32, 0.01, 2.0, 0.00050289464686279097404),
    (32, 0.01, 10.0, 1.6128606288051243267e-5),
    (32, 0.01, 100.0, 1.600127522832018162e-7),
    (32, 0.1, 0.5, 61.62313796852227548),
    (32, 0.1, 1.0, 13.623137968522595297),
    (32, 0.1, 2.0, 1.6272023010194358905),
    (32, 0.1, 10.0, 0.0016532878103028011512),
    (32, 0.1, 100.0, 1.6005114067315077983e-5),
    (32, 0.5, 0.5, 63.284493232970379035),
    (32, 0.5, 1.0, 15.284493232970414571),
    (32, 0.5, 2.0, 3.2849386205373292319),
    (32, 0.5, 10.0, 0.043408047821258962577),
    (32, 0.5, 100.0, 0.00040031524290054912227),
    (32, 1.0, 0.5, 64.0),
    (32, 1.0, 1.0, 16.0),
    (32, 1.0, 2.0, 4.0),
    (32, 1.0, 10.0, 0.16),
    (32, 1.0, 100.0, 0.0016),
    (64, 0.001, 0.5, 120.98259781182767032),
    (64, 0.001, 1.0, 24.982597811827670317),
    (64, 0.001, 2.0, 0.98274463596303863944),
    (64, 0.001, 10.0, 3.2180637677801994659e-7),
    (64, 0.001, 100.0, 3.2001798281380522607e-9),
    (64, 0.01, 0.5, 123.32173187455178022),
    (64, 0.01, 1.0, 27.321731874551780219),
    (64, 0.01, 2.0, 3.3217464086810074608),
    (64, 0.01, 10.0, 3.2361212985521941412e-5),
    (64, 0.01, 100.0, 3.2003564473638414416e-7),
    (64, 0.1, 0.5, 125.66086593727589016),
    (64, 0.1, 1.0, 29.660865937275890155),
    (64, 0.1, 2.0, 5.6608672584151993864),
    (64, 0.1, 10.0, 0.003411063756258708882),
    (64, 0.1, 100.0, 3.2019455165599552888e-5),
    (64, 0.5, 0.5, 127.29585048324069048),
    (64, 0.5, 1.0, 31.295850483240690479),
    (64, 0.5, 2.0, 7.2958506300325136949),
    (64, 0.5, 10.0, 0.094957297162412835088),
    (64, 0.5, 100.0, 0.00080127199740161214118),
    (64, 1.0, 0.5, 128.0),
    (64, 1.0, 1.0, 32.0),
    (64, 1.0, 2.0, 8.0),
    (64, 1.0, 10.0, 0.32),
    (64, 1.0, 100.0, 0.0032),
];

/// `(ρ, α, δ, ε)` for the RDP to (ε, δ) conversion.
pub const RDP_TO_DP: [(f64, u32, f64, f64); 100] = [
    (
        0.0005104802268488711,
        28,
        1.7096833190365856e-07,
        0.41783109461022757381,
    ),
    (0.0035725521043967366, 60, 0.002418050513945565, 0.019484909618342602364),
    (0.0349761242826879, 14, 0.032674081676226235, 0.021030905593136041397),
    (0.15772325187276, 56, 6.98596186614953e-12, 0.53355505068705990721),
    (70.9408190370977, 59, 1.5948999988678972e-09, 71.202671454693637119),
    (13.390058442537539, 34, 5.030502210688349e-09, 13.832368676058263632),
    (
        0.0005876338896023618,
        58,
        5.777615619055905e-05,
        0.083169424151506659946,
    ),
    (0.0031707652096194853, 59, 0.02676755912422282, -0.021802510197572661816),
    (25.678956324332663, 39, 3.7344216411373075e-05, 25.824869544789134276),
    (
        0.0002841942407117923,
        58,
        1.5490194700087367e-05,
        0.10596017650538328985,
    ),
    (0.016506810502090154, 4, 3.529898901295058e-08, 4.9865304554360275477),
    (0.30455171604766634, 57, 2.0135689262473602e-10, 0.61333233411478587174),
    (
        0.00020059998332389907,
        55,
        1.7451278175327312e-07,
        0.19581321436853833832,
    ),
    (0.006861761364660041, 7, 8.387923256314554e-10, 3.0115690510558472026),
    (0.0022322509689569952, 56, 3.7286223035417088e-06, 0.1382886556012029176),
    (0.027065457866977585, 5, 3.683502267326161e-08, 3.6807666137632458309),
    (67.11702683958703, 11, 9.309630638430838e-06, 67.940373246612889886),
    (
        0.00043455914971211944,
        22,
        5.616533968340962e-08,
        0.60172042677946440782,
    ),
    (
        0.00012803238473454027,
        15,
        3.1747327715422063e-10,
        1.2998906799320106071,
    ),
    (0.4316929572633832, 32, 3.547782170186962e-05, 0.61868190071355864968),
    (0.0015080065422254849, 22, 1.0539987993167431e-11, 1.0114071460799916928),
    (0.03626022474797841, 53, 3.2141185455104573e-10, 0.36121214257822918696),
    (1.068961116207075, 52, 1.1200595096508089e-09, 1.3761830362490464092),
    (3.3461876669586723, 41, 1.753645541807498e-08, 3.6751303516020178822),
    (0.03366294774462688, 54, 0.0004222424078517552, 0.086309436168220834912),
    (0.02086134942765158, 11, 5.245003317923068e-12, 2.283136166492757352),
    (1.5833637531714018, 61, 1.1047951094394923e-06, 1.7269173978424517312),
    (0.019162452081776936, 18, 0.03192912014623321, -0.0054156634965674807908),
    (0.011472618965311324, 15, 1.0864584470905304e-10, 1.3878281370208420725),
    (0.13379172133543257, 13, 2.8808126578262868e-05, 0.71124098702087619177),
    (0.020676841208755424, 37, 3.7240322812337274e-11, 0.56001984153405538885),
    (0.5199374927682534, 31, 7.460245342414844e-06, 0.76621217168129847652),
    (0.08692099268210586, 25, 2.6780477836566272e-08, 0.63846219936751934451),
    (6.172080742465456, 61, 1.505693532263526e-10, 6.4639801647630936952),
    (13.400479350048357, 19, 5.123475571632754e-09, 14.243356230246963035),
    (0.006395724258696634, 42, 1.6451257046257818e-11, 0.49676035822030641033),
    (7.69086991695188, 49, 2.316407407207675e-12, 8.1473169498268447216),
    (0.08691496295481946, 4, 1.0196248166268008e-11, 7.7734685335096338611),
    (0.10778091228493289, 31, 0.0008905769911371561, 0.19464621600071294766),
    (0.8298994555533314, 7, 1.9579147498559378e-10, 4.0770922385800916337),
    (1.0787643355929186, 25, 0.08507719597996574, 1.0064973586467143815),
    (0.8611231014810199, 25, 7.035052346077503e-07, 1.2764808859084486222),
    (24.5860243010186, 42, 1.8206713508633944e-08, 24.905434208427267966),
    (
        0.00012724282784865056,
        33,
        1.7869831516129972e-11,
        0.63346182333745488864,
    ),
    (0.06688849299698028, 24, 9.842841529879309e-07, 0.48751572109433634375),
    (0.7039463470299133, 22, 3.331594871873793e-09, 1.4397488196687584458),
    (0.1586130357962869, 49, 5.245368251801538e-07, 0.35817978824765582486),
    (0.06664495583518738, 57, 8.034928521565887e-12, 0.43294844560773037758),
    (0.0023842001026829714, 11, 2.3682708346969395e-08, 1.4231365590895350403),
    (87.08887447829345, 46, 1.8048270962949532e-09, 87.429210230347719834),
    (0.009328216913119207, 8, 2.1610959280550165e-06, 1.4422901884542447794),
    (0.01765291496680992, 63, 0.00023443471571577508, 0.069639649108220426262),
    (0.39210020782608906, 22, 4.070474480232953e-12, 1.4473049107626639123),
    (7.666989881729828, 30, 7.778259967120403e-11, 8.3184643984233962731),
    (6.210143091654852, 8, 2.4707598815696944e-12, 9.597619388539107932),
    (0.23102391961385677, 8, 6.239619292768976e-11, 3.1572175714905863998),
    (1.1577248580234625, 13, 1.938538374461566e-08, 2.3438319097333823591),
    (0.0051977388167594625, 63, 8.95638605036251e-06, 0.10984270438231631815),
    (24.880065604504928, 58, 2.7346714778388994e-10, 25.177750995275985219),
    (44.94698179772154, 12, 3.6629487672086155e-09, 46.399978665279691665),
    (
        0.00014815008505609847,
        64,
        0.0002702481464255391,
        0.048801172114515605794,
    ),
    (0.003011551391121006, 41, 0.0005111140693966408, 0.074952581255394506625),
    (0.03562407567273548, 60, 0.006319304535456209, 0.035254271873549403872),
    (
        0.0018867067171732747,
        41,
        2.1363136437046528e-05,
        0.15320088540197877401,
    ),
    (0.007172864513612866, 41, 3.0212240250836364e-05, 0.14982253549010328185),
    (0.2343378723166341, 51, 9.004672440937298e-09, 0.50640917705042848251),
    (0.04676306960711844, 64, 3.7056407543749634e-07, 0.20005211550647773917),
    (27.029521792631044, 39, 2.516563910135695e-05, 27.185821816109125706),
    (0.002036513788806483, 30, 1.1992470530730374e-05, 0.24158441656896453092),
    (11.540559974742933, 43, 0.0003197521666362937, 11.619095292232799465),
    (0.34601895197665045, 61, 0.0003856752613600772, 0.39198366619583933552),
    (0.0002658361198328827, 21, 9.928717997871004e-06, 0.37525350967334507588),
    (0.0009475579724840996, 59, 1.9322684686821985e-05, 0.1006926648887502842),
    (0.0022636828562777422, 59, 8.486588807991834e-12, 0.3543933278045434283),
    (0.883483074492885, 46, 0.0033871281167521944, 0.90281820073735783424),
    (0.002536258370951762, 3, 0.002211502708207763, 2.1048065239559542925),
    (2.273617052945948, 62, 4.071577764813765e-06, 2.3931654761951826185),
    (0.023464801009459028, 16, 0.0002522415479575975, 0.32642859211603802478),
    (0.13764029910223505, 13, 1.7713088323784293e-08, 1.3312653130824361832),
    (2.8832763528528327, 49, 1.499483752044196e-07, 3.1089311170934692623),
    (45.83829727644577, 45, 0.002402941474165626, 45.866378947595400881),
    (
        0.0014000776409698466,
        40,
        0.00013506675341801324,
        0.10995052549921166936,
    ),
    (89.21715043681617, 7, 0.0006826037088804448, 89.953614080153938348),
    (0.08616800973605102, 22, 4.026306127130434e-07, 0.59365770056470595658),
    (7.961590613524697, 56, 3.16974906197569e-06, 8.1005994978898970233),
    (0.001213180353918723, 57, 1.6803731031484992e-09, 0.2721064374535628496),
    (67.21559845485366, 51, 8.544379158300324e-08, 67.442667456614541435),
    (0.2186053184372265, 62, 1.2588318959042936e-11, 0.54613360762545923881),
    (0.0001341364130689617, 17, 4.454275781164571e-06, 0.53253656018104634816),
    (0.010694968755810708, 37, 9.886127694089688e-10, 0.45895711917425193592),
    (
        0.00012701072235033617,
        51,
        2.487585962966414e-06,
        0.15977182698237067956,
    ),
    (0.21358617117417134, 52, 1.9736779654829507e-07, 0.41940246066466345229),
    (2.2216450583867506, 40, 0.000765485314172058, 2.2857149702372906734),
    (0.09215089090243211, 22, 1.2472572002866079e-06, 0.54579855164534307414),
    (54.754870124338225, 39, 2.5428750508406325e-12, 55.335056851595900459),
    (0.6604881753642515, 46, 1.271111512740863e-05, 0.80394020962099381385),
    (0.001040732909306207, 61, 1.4100671914344861e-06, 0.14052808657537301539),
    (89.49025128923596, 3, 3.873026315743597e-08, 97.068802311181873226),
    (0.0022023700163546008, 17, 6.232366327507528e-08, 0.80143470516009472424),
    (0.019386018560216045, 34, 0.07037062515677585, -0.03690273748118003364),
];
