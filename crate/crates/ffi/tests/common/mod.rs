pub const CONFIG: &str = r#"
[f]
family = "linear"
c = "1/2"

[g]
family = "linear"
c = "1/10"

[expansion]
d = [2]
blocks = 144

[set]
N = 3
eps = "1"
alpha = "3/4"
depth = 8

[verify]
n_range = [3, 5]

[foran]
N = 5
eps = "2"
alpha = "3/4"
trials = 2
"#;
