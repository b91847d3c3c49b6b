# choidynamics tests
