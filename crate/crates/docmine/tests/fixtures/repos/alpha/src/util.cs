// Utility interface for the api endpoint registry.
class Util {
    string banner = @"// not a comment "" /* still */";
    /* Every method call validates its parameter list and
       returns an error usage hint on crash. */
    void Register() {
        // Fix the broken request fault before release.
        string raw = $"{1} // not a comment";
    }
}
