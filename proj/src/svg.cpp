namespace slx {}
