int max(int a, int b) {
    return a >= b ? a : b;
}

boolean isEmpty(String s) {
    return s == null || s.length() == 0;
}

int sum(int[] values) {
    int total = 0;
    for (int i = 0; i < values.length; i++) {
        total += values[i];
    }
    return total;
}

double average(double[] xs) {
    if (xs.length == 0) {
        return 0.0;
    }
    double s = 0;
    for (double x : xs) {
        s += x;
    }
    return s / xs.length;
}

long factorial(int n) {
    long r = 1L;
    while (n > 1) {
        r *= n--;
    }
    return r;
}

int indexOf(int[] a, int key) {
    int i = 0;
    while (true) {
        if (i >= a.length) {
            break;
        }
        if (a[i] == key) {
            return i;
        }
        i++;
    }
    return -1;
}

boolean negate(boolean flag) {
    return !flag;
}

int invert(int mask) {
    return ~mask & 0xFF;
}

int[] copy(int[] src) {
    int[] dst = new int[src.length];
    for (int i = 0; i < src.length; i++) dst[i] = src[i];
    return dst;
}

int[][] grid(int n, int m) {
    return new int[n][m];
}

int trace(int[][] m) {
    int t = 0;
    for (int i = 0; i < m.length; i++) {
        t += m[i][i];
    }
    return t;
}

String sign(int x) {
    if (x > 0) {
        return "positive";
    } else if (x < 0) {
        return "negative";
    } else {
        return "zero";
    }
}

void countdown(int n) {
    do {
        System.out.println(n);
        n--;
    } while (n > 0);
}

void drain(java.util.Queue<String> q) {
    do {
        while (!q.isEmpty()) {
            q.poll();
        }
    } while (false);
}

int firstNegative(int[] a) {
    for (int i = 0; i < a.length; i++) {
        if (a[i] < 0) {
            return i;
        }
    }
    return -1;
}

int abs(int x) {
    return x < 0 ? -x : x;
}

int clamp(int v, int lo, int hi) {
    return v < lo ? lo : v > hi ? hi : v;
}

float scale(float f, float k) {
    return f * -k;
}

long mix(long a, long b) {
    return a ^ (b >>> 7) | ~a;
}

boolean inRange(int v, int lo, int hi) {
    return v >= lo && v <= hi;
}

boolean outside(int v, int lo, int hi) {
    return v < lo || v > hi;
}

int shiftAssign(int x) {
    x >>= 2;
    x >>>= 1;
    return x;
}

int orAssign(int x, int y) {
    x |= y;
    return x | y;
}

String describe(Object o) {
    // else and true inside a comment do not count
    return "else if true || false >= 0";
}

char bracket() {
    return '[';
}

double toDouble(int x) {
    return (double) x;
}

int truncate(double d) {
    return (int) -d;
}

long widen(int x) {
    return (long) x * -1;
}

int subtract(int a, int b) {
    return a - -b;
}

int binary(int a, int b) {
    return (a) - b;
}

int callMinus(int a) {
    return Math.abs(a) - 1;
}

int indexMinus(int[] a, int i) {
    return a[i] - 1;
}

int plusUnary(int a) {
    return +a;
}

void args(java.util.List<Integer> out) {
    out.add(-1);
    out.add(+2);
    out.add(3 - 4);
}

int switchCase(int k) {
    switch (k) {
        case -1:
            return 0;
        case 0:
            break;
        default:
            return k;
    }
    return 1;
}

void labeled(int[][] m) {
    outer:
    for (int i = 0; i < m.length; i++) {
        for (int j = 0; j < m[i].length; j++) {
            if (m[i][j] == 0) {
                break outer;
            }
        }
    }
}

java.util.function.IntUnaryOperator neg() {
    return x -> -x;
}

void asserts(int x) {
    assert -x <= 0 : "non-negative";
}

void throwing(int code) {
    if (code != 0) throw new IllegalStateException("code " + -code);
}

String[] names() {
    return new String[] { "a", "b", "c" };
}

int[] literalArray() {
    int[] a = { 1, 2, 3 };
    return a;
}

int oldStyle() {
    int a[] = new int[3];
    a[0] = 1;
    return a[0];
}

Object[] pair(Object x, Object y) {
    Object[] o = { x, y };
    return o;
}

int fromCall(int[] a) {
    return get(a)[0];
}

int parenthesized() {
    return (new int[] { 4, 5 })[1];
}

int lengthOfNew() {
    return new int[] { 1 }.length;
}

java.util.function.IntFunction<String[]> maker() {
    return String[]::new;
}

String[][] table(int r) {
    String[][] t = new String[r][];
    return t;
}

int fieldAccess(int i) {
    return this.items[i] + data.values[i];
}

void postIncrement(int[] a, int i) {
    a[i]++;
    --a[i];
}

java.util.Map<String, java.util.List<Integer>> index() {
    java.util.Map<String, java.util.List<Integer>> m = new java.util.HashMap<>();
    return m;
}

int wildcard(java.util.List<? extends Number> xs) {
    return xs.isEmpty() ? 0 : xs.size();
}

int lessThanTernary(int a, int b) {
    return a < b ? a : b;
}

int compactTernary(int x, int y) {
    return x<y?x:y;
}

int nestedTernary(boolean a, boolean b) {
    return a ? b ? 1 : 2 : 3;
}

String ternaryCall(String s) {
    return s.isEmpty() ? "" : s.substring(1);
}

int ternaryIndex(int[] a, int i) {
    return a[i] > 0 ? a[i] : -a[i];
}

boolean genericCompare(java.util.List<Integer> xs, int n) {
    return xs.size() >= n || n < 0;
}

float[] floats(int n) {
    float[] f = new float[n];
    return f;
}

double[][] matrix() {
    return new double[][] { { 1.0, 0.0 }, { 0.0, 1.0 } };
}

long[] longs(long seed) {
    long[] l = new long[2];
    l[0] = seed;
    l[1] = -seed;
    return l;
}

boolean allTrue(boolean[] bs) {
    for (boolean b : bs) {
        if (!b) {
            return false;
        }
    }
    return true;
}

boolean anyTrue(boolean[] bs) {
    boolean r = false;
    for (int i = 0; i < bs.length; i++) r = r || bs[i];
    return r;
}

void nestedLoops(int n) {
    int i = 0;
    while (i < n) {
        int j = 0;
        while (j < i) {
            j++;
        }
        i++;
    }
}

void infinite() {
    for (;;) {
        break;
    }
}

void whileBreak(java.util.Iterator<String> it) {
    while (it.hasNext()) {
        if (it.next().isEmpty()) break;
    }
}

int bits(int x) {
    return ~~x;
}

boolean notNot(boolean b) {
    return !!b;
}

int minusMinus(int a) {
    return - -a;
}

int lambdaTernary(java.util.List<Integer> xs) {
    return xs.stream().mapToInt(x -> x >= 0 ? x : -x).sum();
}

String elseChain(int d) {
    if (d == 1) return "one";
    else if (d == 2) return "two";
    else if (d == 3) return "three";
    else return "many";
}

void tryCatch(String s) {
    try {
        Integer.parseInt(s);
    } catch (NumberFormatException e) {
        return;
    } finally {
        System.out.println(true);
    }
}

int instanceOf(Object o) {
    return o instanceof String ? 1 : 0;
}

double hypot(double a, double b) {
    return Math.sqrt(a * a + b * b);
}

int textSwitch(String s) {
    switch (s) {
        case "a": return 1;
        case "b": return 2;
        default: break;
    }
    return 0;
}

long parseLong(String s) {
    long v = 0;
    for (char c : s.toCharArray()) {
        v = v * 10 + (c - '0');
    }
    return v;
}

boolean between(long a, long lo, long hi) {
    return a >= lo && !(a >= hi);
}

int[] reverse(int[] a) {
    int[] r = new int[a.length];
    for (int i = 0, j = a.length - 1; i < a.length; i++, j--) {
        r[j] = a[i];
    }
    return r;
}

void fill(double[] d, double v) {
    java.util.Arrays.fill(d, v);
}

int charAt(String s, int i) {
    return s.toCharArray()[i];
}

void swap(int[] a, int i, int j) {
    int t = a[i];
    a[i] = a[j];
    a[j] = t;
}

int count(java.util.List<String> xs, String k) {
    int c = 0;
    for (String x : xs) if (x.equals(k)) c++;
    return c;
}

Object generic(java.util.List<String>[] lists) {
    return lists[0];
}

boolean flags(int a, int b, int c) {
    return a >= 0 || b >= 0 || c >= 0;
}

int deep(int[][][] cube) {
    return cube[0][1][2];
}

int[][][] cubeOf(int n) {
    return new int[n][n][n];
}

double mean(long[] xs) {
    double s = 0;
    for (long x : xs) s += x;
    return xs.length == 0 ? 0 : s / xs.length;
}

void printAll(String... items) {
    for (String item : items) System.out.println(item);
}

boolean isTrue(Boolean b) {
    return b != null && b == true;
}

int signum(double d) {
    return d > 0 ? 1 : d < 0 ? -1 : 0;
}

void matrixFill(double[][] m) {
    for (int i = 0; i < m.length; i++)
        for (int j = 0; j < m[i].length; j++)
            m[i][j] = i == j ? 1.0 : 0.0;
}

int negativeLiteralIndex(int[] a) {
    return a[a.length + -1];
}

String join(String[] parts, String sep) {
    StringBuilder sb = new StringBuilder();
    for (int i = 0; i < parts.length; i++) {
        if (i > 0) sb.append(sep);
        sb.append(parts[i]);
    }
    return sb.toString();
}

int binarySearch(int[] a, int key) {
    int lo = 0, hi = a.length - 1;
    while (lo <= hi) {
        int mid = (lo + hi) >>> 1;
        if (a[mid] < key) lo = mid + 1;
        else if (a[mid] > key) hi = mid - 1;
        else return mid;
    }
    return -(lo + 1);
}

void bubble(int[] a) {
    boolean swapped = true;
    while (swapped) {
        swapped = false;
        for (int i = 1; i < a.length; i++) {
            if (a[i - 1] > a[i]) {
                int t = a[i];
                a[i] = a[i - 1];
                a[i - 1] = t;
                swapped = true;
            }
        }
    }
}

long gcd(long a, long b) {
    while (b != 0) {
        long t = b;
        b = a % b;
        a = t;
    }
    return a;
}

boolean isPrime(int n) {
    if (n < 2) return false;
    for (int i = 2; (long) i * i <= n; i++) {
        if (n % i == 0) return false;
    }
    return true;
}

float lerp(float a, float b, float t) {
    return a + (b - a) * t;
}

double clampUnit(double x) {
    return x >= 1.0 ? 1.0 : x <= -1.0 ? -1.0 : x;
}

int parseSign(String s) {
    return s.charAt(0) == '-' ? -1 : +1;
}

int annotated(@SuppressWarnings("unused") int x) {
    return x;
}

int arrayInTernary(boolean b, int[] a, int[] c) {
    return (b ? a : c)[0];
}

int[] grow(int[] a) {
    int[] b = java.util.Arrays.copyOf(a, a.length >= 8 ? a.length * 2 : 16);
    return b;
}

String genericArrayCreation() {
    java.util.List<String>[] buckets = new java.util.List[4];
    return buckets.toString();
}

Object qualifiedCreation() {
    return new java.lang.String[2];
}

void newObjectThenIndex() {
    Object o = new StringBuilder[] { new StringBuilder() }[0];
}

int unaryAfterComma(int a) {
    return Math.max(a, -a);
}

int unaryAfterBracket(int[] a) {
    return a[-0 + 0];
}

int unaryAfterBrace() {
    int[] a = { -1, -2 };
    return a[1];
}

boolean orOfCalls(String s) {
    return s.startsWith("a") || s.endsWith("z") || s.contains("m");
}

boolean whileFlag(java.util.concurrent.atomic.AtomicBoolean f) {
    while (!f.get()) {
        Thread.onSpinWait();
    }
    return true;
}

long longShift(long x) {
    return x << 3 | x >> 61;
}

int castChain(Object o) {
    return (int) (long) (double) -((Number) o).doubleValue();
}

boolean doubleCheck(double d) {
    return !Double.isNaN(d) && d >= 0.0;
}

int sumMatrix(int[][] m) {
    int s = 0;
    for (int[] row : m) for (int v : row) s += v;
    return s;
}

void emptyElse(boolean b) {
    if (b) {
    } else {
    }
}

int doWhileCount(int n) {
    int c = 0;
    do c++; while (c < n);
    return c;
}

boolean ternaryOr(boolean a, boolean b) {
    return a || b ? true : false;
}

double area(double r) {
    final double PI = 3.14159;
    return PI * r * r;
}

long mask(int bits) {
    return bits >= 64 ? -1L : (1L << bits) - 1;
}
