// Glue code for the render api method table.
class Glue {
    String banner = "// not a comment";
    /** One endpoint per call; a broken return means a bug needs
     * a fix before release. */
    void attach() {
        // Fix the crash when the request parameter is missing.
    }
}
