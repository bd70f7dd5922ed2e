// Pre-generated groups (512/160 test, 2048/256 prod).
// Invariants (primality, q | p-1, order of g) are re-checked in tests.
const TEST_P_HEX: &str = "85959a534fc964dac965326a4f507707f48543c8828bf4ce7df2205bea21d0c005a68035e38c272fdea2c22fa2b3380e14762fbe7e250cd97610f494a12c026f";
const TEST_Q_HEX: &str = "c5302bbd8b739cf399c7ba64ddd99d2837fb3145";
const TEST_G_HEX: &str = "61add85a24229f988cc5b15906a886898e4e4c8f21b465de982e1b940d5d13a5163add3ec7e641c0cb22f944294873dc4d32830f57726425714cd940885bd05e";
const PROD_P_HEX: &str = "92ff3fc8def65b1e245fe46db4363c704c4a3c06f2cf2763170e4ac0041b841674161de5e0115d1485a63cbbcec7f93855bd2f40542dc2d8511a94e775e41ed84b87391284f75ff6038de60e6bcda3a3fe941d13d93989fcec0af51c3abe45372796e2d5475cb83acf681be5b2c09bbe306996a7a8abb64e92577b06dae9005b886b9ce1c0458b80447a38dca0551193e13c8ab0da5222e62501e14a365c876fc32f5796e83274207bde585d191040f6ffa27468e7fdcfaac2f6adfaba434cc434e9be91f484f9c84c5b4f973a9b3669075664a63708f53f42c569a261adb906a2365182dcf557e90ce0504951d2b4c5191cd65cdcbf88dbc58a0c2a4b82ded9";
const PROD_Q_HEX: &str = "d58d4aee158f43593016965d0a7d5e13b0b62e98779e10bae664ea7ba8beea5f";
const PROD_G_HEX: &str = "47925ec1ac7def68bd076a226947431040d023466d67089dfe12266037da76c3f010fb9d2e8d024d6f41e84536a47db875a4e97bd9d119b258d1e24ff5a31e6863d092310157a53d4bf0dbf7b0938324e27518af54ba41df4796fe3ec631097211b9b3c9580dd32b9071300c31e2e4031782dd5eee7151d95cce369d7843d3f9b828f7f0e05092fe68b8e8dcae486fafcf5fd1d3b9310a1c52f3fea0a7a7c8cb7c5eaa404928c5c1dfc0fc360ab373b09c1f6d510e76babb848d477f9dab76a4167624db818b4a3b4431fae242970cc75721531359c1ab0f045e5bd0fc015c5b4fee6a331165edf1dcf2d13baf99aa0df05d0f10720ef326ebc83d4dd294235c";
